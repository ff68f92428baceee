#include "pinsim/time.hpp"

#include "pinsim/error.hpp"

#include <array>
#include <charconv>
#include <cstdio>

namespace pinsim {

namespace {

// Days since 1970-01-01 for a civil date (Howard Hinnant's algorithm).
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp + (mp < 10 ? 3 : -9);
    y += m <= 2;
}

struct Reader {
    std::string_view s;
    std::size_t pos = 0;

    bool done() const { return pos >= s.size(); }
    char peek() const { return done() ? '\0' : s[pos]; }

    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError("invalid timestamp: " + what + " in \"" + std::string(s) + "\"", pos);
    }

    unsigned fixed_digits(int n, const char* what) {
        unsigned value = 0;
        for (int i = 0; i < n; ++i) {
            if (done() || s[pos] < '0' || s[pos] > '9') fail(std::string("expected ") + what);
            value = value * 10 + static_cast<unsigned>(s[pos] - '0');
            ++pos;
        }
        return value;
    }

    void expect(char c) {
        if (peek() != c) fail(std::string("expected '") + c + "'");
        ++pos;
    }
};

} // namespace

std::int64_t parse_rfc3339(std::string_view text) {
    Reader r{text};
    const std::int64_t year = r.fixed_digits(4, "year");
    r.expect('-');
    const unsigned month = r.fixed_digits(2, "month");
    r.expect('-');
    const unsigned day = r.fixed_digits(2, "day");
    if (month < 1 || month > 12 || day < 1 || day > 31) r.fail("date out of range");

    char sep = r.peek();
    if (sep != 'T' && sep != 't' && sep != ' ') r.fail("expected 'T'");
    ++r.pos;

    const unsigned hour = r.fixed_digits(2, "hour");
    r.expect(':');
    const unsigned minute = r.fixed_digits(2, "minute");
    r.expect(':');
    const unsigned second = r.fixed_digits(2, "second");
    if (hour > 23 || minute > 59 || second > 60) r.fail("time out of range");

    if (r.peek() == '.') {
        ++r.pos;
        if (r.done() || r.peek() < '0' || r.peek() > '9') r.fail("expected fractional digits");
        while (!r.done() && r.peek() >= '0' && r.peek() <= '9') ++r.pos;
    }

    std::int64_t offset = 0;
    char tz = r.peek();
    if (tz == 'Z' || tz == 'z') {
        ++r.pos;
    } else if (tz == '+' || tz == '-') {
        ++r.pos;
        const unsigned oh = r.fixed_digits(2, "offset hour");
        r.expect(':');
        const unsigned om = r.fixed_digits(2, "offset minute");
        offset = static_cast<std::int64_t>(oh) * 3600 + static_cast<std::int64_t>(om) * 60;
        if (tz == '+') offset = -offset;
    } else {
        r.fail("expected timezone");
    }
    if (!r.done()) r.fail("trailing characters");

    const std::int64_t days = days_from_civil(year, month, day);
    return days * kSecondsPerDay + hour * 3600 + minute * 60 + second + offset;
}

std::string format_rfc3339(std::int64_t epoch_seconds) {
    std::int64_t days = epoch_seconds / kSecondsPerDay;
    std::int64_t rem = epoch_seconds % kSecondsPerDay;
    if (rem < 0) {
        rem += kSecondsPerDay;
        --days;
    }
    std::int64_t year;
    unsigned month, day;
    civil_from_days(days, year, month, day);
    const unsigned hour = static_cast<unsigned>(rem / 3600);
    const unsigned minute = static_cast<unsigned>((rem / 60) % 60);
    const unsigned second = static_cast<unsigned>(rem % 60);

    std::array<char, 32> buf{};
    std::snprintf(buf.data(), buf.size(), "%04lld-%02u-%02uT%02u:%02u:%02uZ",
                  static_cast<long long>(year), month, day, hour, minute, second);
    return std::string(buf.data());
}

} // namespace pinsim
