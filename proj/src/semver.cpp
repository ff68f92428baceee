#include "pinsim/semver.hpp"

#include "pinsim/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <limits>
#include <sstream>

namespace pinsim {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_ident_char(char c) {
    return is_digit(c) || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '-';
}

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), is_digit);
}

struct VersionReader {
    std::string_view s;
    std::size_t pos = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError("invalid version \"" + std::string(s) + "\": " + what, pos);
    }

    bool done() const { return pos >= s.size(); }
    char peek() const { return done() ? '\0' : s[pos]; }

    std::uint64_t numeric_component(const char* what) {
        const std::size_t start = pos;
        while (!done() && is_digit(s[pos])) ++pos;
        if (pos == start) fail(std::string("expected ") + what);
        const std::string_view digits = s.substr(start, pos - start);
        if (digits.size() > 1 && digits[0] == '0') {
            pos = start;
            fail(std::string("leading zero in ") + what);
        }
        std::uint64_t value = 0;
        auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
        if (ec != std::errc{}) {
            pos = start;
            fail(std::string("numeric overflow in ") + what);
        }
        return value;
    }

    std::string identifier(bool numeric_leading_zero_ok) {
        const std::size_t start = pos;
        while (!done() && is_ident_char(s[pos])) ++pos;
        if (pos == start) fail("expected identifier");
        std::string ident(s.substr(start, pos - start));
        if (!numeric_leading_zero_ok && all_digits(ident) && ident.size() > 1 && ident[0] == '0') {
            pos = start;
            fail("leading zero in numeric identifier");
        }
        return ident;
    }
};

int compare_prerelease(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    if (a.empty() && b.empty()) return 0;
    if (a.empty()) return 1;  // release sorts above any prerelease
    if (b.empty()) return -1;
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        const bool na = all_digits(a[i]);
        const bool nb = all_digits(b[i]);
        if (na && nb) {
            std::uint64_t va = 0;
            std::uint64_t vb = 0;
            std::from_chars(a[i].data(), a[i].data() + a[i].size(), va);
            std::from_chars(b[i].data(), b[i].data() + b[i].size(), vb);
            if (va != vb) return va < vb ? -1 : 1;
        } else if (na != nb) {
            return na ? -1 : 1;  // numeric identifiers sort below alphanumeric
        } else {
            const int c = a[i].compare(b[i]);
            if (c != 0) return c < 0 ? -1 : 1;
        }
    }
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    return 0;
}

// ---------------------------------------------------------------------------
// Range grammar (npm subset)
// ---------------------------------------------------------------------------

// A version in a range expression where components may be wildcards
// ("1", "1.2", "1.2.x", "*") and a full version may carry a prerelease.
struct Partial {
    std::optional<std::uint64_t> major;
    std::optional<std::uint64_t> minor;
    std::optional<std::uint64_t> patch;
    std::vector<std::string> prerelease;
    std::string build;

    bool full() const { return major && minor && patch; }
    Version filled() const {
        Version v;
        v.major = major.value_or(0);
        v.minor = minor.value_or(0);
        v.patch = patch.value_or(0);
        v.prerelease = prerelease;
        return v;
    }
};

[[noreturn]] void range_fail(std::string_view source, const std::string& what) {
    throw ParseError("invalid range \"" + std::string(source) + "\": " + what, 0);
}

Partial parse_partial(std::string_view text, std::string_view source) {
    Partial p;
    std::size_t pos = 0;
    auto component = [&](const char* what) -> std::optional<std::uint64_t> {
        if (pos >= text.size()) range_fail(source, std::string("expected ") + what);
        const char c = text[pos];
        if (c == 'x' || c == 'X' || c == '*') {
            ++pos;
            return std::nullopt;
        }
        const std::size_t start = pos;
        while (pos < text.size() && is_digit(text[pos])) ++pos;
        if (pos == start) range_fail(source, std::string("expected ") + what);
        std::uint64_t value = 0;
        const std::string_view digits = text.substr(start, pos - start);
        if (digits.size() > 1 && digits[0] == '0') range_fail(source, std::string("leading zero in ") + what);
        auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
        if (ec != std::errc{}) range_fail(source, std::string("numeric overflow in ") + what);
        return value;
    };

    p.major = component("major");
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        p.minor = component("minor");
        if (pos < text.size() && text[pos] == '.') {
            ++pos;
            p.patch = component("patch");
        }
    }
    // A wildcard truncates everything after it.
    if (!p.major) p.minor.reset();
    if (!p.minor) p.patch.reset();

    if (pos < text.size() && text[pos] == '-') {
        if (!p.full()) range_fail(source, "prerelease on wildcard version");
        ++pos;
        while (true) {
            const std::size_t start = pos;
            while (pos < text.size() && is_ident_char(text[pos])) ++pos;
            if (pos == start) range_fail(source, "empty prerelease identifier");
            p.prerelease.emplace_back(text.substr(start, pos - start));
            if (pos < text.size() && text[pos] == '.') { ++pos; continue; }
            break;
        }
    }
    if (pos < text.size() && text[pos] == '+') {
        ++pos;
        const std::size_t start = pos;
        while (pos < text.size() && (is_ident_char(text[pos]) || text[pos] == '.')) ++pos;
        if (pos == start) range_fail(source, "empty build metadata");
        p.build.assign(text.substr(start, pos - start));
    }
    if (pos != text.size()) range_fail(source, "unexpected character");
    return p;
}

Version make(std::uint64_t major, std::uint64_t minor, std::uint64_t patch) {
    Version v;
    v.major = major;
    v.minor = minor;
    v.patch = patch;
    return v;
}

Comparator cmp(CompareOp op, Version v) { return Comparator{op, std::move(v)}; }

void desugar_plain(const Partial& p, std::vector<Comparator>& out) {
    if (!p.major) {
        out.push_back(cmp(CompareOp::Ge, make(0, 0, 0)));
    } else if (!p.minor) {
        out.push_back(cmp(CompareOp::Ge, make(*p.major, 0, 0)));
        out.push_back(cmp(CompareOp::Lt, make(*p.major + 1, 0, 0)));
    } else if (!p.patch) {
        out.push_back(cmp(CompareOp::Ge, make(*p.major, *p.minor, 0)));
        out.push_back(cmp(CompareOp::Lt, make(*p.major, *p.minor + 1, 0)));
    } else {
        out.push_back(cmp(CompareOp::Eq, p.filled()));
    }
}

void desugar_caret(const Partial& p, std::vector<Comparator>& out) {
    if (!p.major) {
        out.push_back(cmp(CompareOp::Ge, make(0, 0, 0)));
        return;
    }
    if (!p.minor) {
        out.push_back(cmp(CompareOp::Ge, make(*p.major, 0, 0)));
        out.push_back(cmp(CompareOp::Lt, make(*p.major + 1, 0, 0)));
        return;
    }
    if (!p.patch) {
        out.push_back(cmp(CompareOp::Ge, make(*p.major, *p.minor, 0)));
        out.push_back(cmp(CompareOp::Lt, *p.major > 0 ? make(*p.major + 1, 0, 0)
                                                      : make(0, *p.minor + 1, 0)));
        return;
    }
    out.push_back(cmp(CompareOp::Ge, p.filled()));
    if (*p.major > 0) {
        out.push_back(cmp(CompareOp::Lt, make(*p.major + 1, 0, 0)));
    } else if (*p.minor > 0) {
        out.push_back(cmp(CompareOp::Lt, make(0, *p.minor + 1, 0)));
    } else {
        out.push_back(cmp(CompareOp::Lt, make(0, 0, *p.patch + 1)));
    }
}

void desugar_tilde(const Partial& p, std::vector<Comparator>& out) {
    if (!p.major) {
        out.push_back(cmp(CompareOp::Ge, make(0, 0, 0)));
        return;
    }
    if (!p.minor) {
        out.push_back(cmp(CompareOp::Ge, make(*p.major, 0, 0)));
        out.push_back(cmp(CompareOp::Lt, make(*p.major + 1, 0, 0)));
        return;
    }
    Partial lower = p;
    if (!lower.patch) lower.patch = 0;
    out.push_back(cmp(CompareOp::Ge, lower.filled()));
    out.push_back(cmp(CompareOp::Lt, make(*p.major, *p.minor + 1, 0)));
}

void desugar_primitive(CompareOp op, const Partial& p, std::vector<Comparator>& out,
                       std::string_view source) {
    if (p.full()) {
        out.push_back(cmp(op, p.filled()));
        return;
    }
    // Wildcard components follow npm's rules, e.g. ">1.2" means ">=1.3.0"
    // and "<=1.2" means "<1.3.0".
    switch (op) {
    case CompareOp::Gt:
        if (!p.major) {
            out.push_back(cmp(CompareOp::Lt, make(0, 0, 0)));  // ">*": impossible
        } else if (!p.minor) {
            out.push_back(cmp(CompareOp::Ge, make(*p.major + 1, 0, 0)));
        } else {
            out.push_back(cmp(CompareOp::Ge, make(*p.major, *p.minor + 1, 0)));
        }
        break;
    case CompareOp::Ge:
        if (!p.major) {
            out.push_back(cmp(CompareOp::Ge, make(0, 0, 0)));
        } else if (!p.minor) {
            out.push_back(cmp(CompareOp::Ge, make(*p.major, 0, 0)));
        } else {
            out.push_back(cmp(CompareOp::Ge, make(*p.major, *p.minor, 0)));
        }
        break;
    case CompareOp::Lt:
        if (!p.major) {
            out.push_back(cmp(CompareOp::Lt, make(0, 0, 0)));  // "<*": impossible
        } else if (!p.minor) {
            out.push_back(cmp(CompareOp::Lt, make(*p.major, 0, 0)));
        } else {
            out.push_back(cmp(CompareOp::Lt, make(*p.major, *p.minor, 0)));
        }
        break;
    case CompareOp::Le:
        if (!p.major) {
            out.push_back(cmp(CompareOp::Ge, make(0, 0, 0)));
        } else if (!p.minor) {
            out.push_back(cmp(CompareOp::Lt, make(*p.major + 1, 0, 0)));
        } else {
            out.push_back(cmp(CompareOp::Lt, make(*p.major, *p.minor + 1, 0)));
        }
        break;
    case CompareOp::Eq:
        desugar_plain(p, out);
        break;
    default:
        range_fail(source, "unsupported comparator");
    }
}

std::vector<std::string> split_ws(std::string_view text) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        const std::size_t start = i;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        if (i > start) tokens.emplace_back(text.substr(start, i - start));
    }
    return tokens;
}

std::string_view strip_op(std::string_view token, CompareOp& op) {
    op = CompareOp::Eq;
    if (token.size() >= 2 && token.substr(0, 2) == ">=") {
        op = CompareOp::Ge;
        return token.substr(2);
    }
    if (token.size() >= 2 && token.substr(0, 2) == "<=") {
        op = CompareOp::Le;
        return token.substr(2);
    }
    if (!token.empty() && token[0] == '>') {
        op = CompareOp::Gt;
        return token.substr(1);
    }
    if (!token.empty() && token[0] == '<') {
        op = CompareOp::Lt;
        return token.substr(1);
    }
    if (!token.empty() && token[0] == '=') {
        return token.substr(1);
    }
    return token;
}

std::string_view strip_v(std::string_view t) {
    if (!t.empty() && (t[0] == 'v' || t[0] == 'V')) return t.substr(1);
    return t;
}

std::vector<Comparator> parse_conjunction(std::string_view part, std::string_view source) {
    std::vector<std::string> raw = split_ws(part);

    // Re-join comparators written with a space ("> = 1.2" stays invalid,
    // ">= 1.2" is accepted).
    std::vector<std::string> tokens;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const std::string& t = raw[i];
        const bool bare_op = (t == ">" || t == "<" || t == ">=" || t == "<=" || t == "=" ||
                              t == "^" || t == "~");
        if (bare_op && i + 1 < raw.size() && raw[i + 1] != "-") {
            tokens.push_back(t + raw[i + 1]);
            ++i;
        } else {
            tokens.push_back(t);
        }
    }

    std::vector<Comparator> out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const std::string& token = tokens[i];
        if (token == "-") range_fail(source, "misplaced hyphen");
        if (i + 1 < tokens.size() && tokens[i + 1] == "-") {
            // Hyphen range: "<lower> - <upper>".
            if (i + 2 >= tokens.size()) range_fail(source, "hyphen range missing upper bound");
            Partial lo = parse_partial(strip_v(token), source);
            Partial hi = parse_partial(strip_v(tokens[i + 2]), source);
            out.push_back(cmp(CompareOp::Ge, lo.filled()));
            if (hi.full()) {
                out.push_back(cmp(CompareOp::Le, hi.filled()));
            } else if (hi.major && hi.minor) {
                out.push_back(cmp(CompareOp::Lt, make(*hi.major, *hi.minor + 1, 0)));
            } else if (hi.major) {
                out.push_back(cmp(CompareOp::Lt, make(*hi.major + 1, 0, 0)));
            }
            i += 2;
            continue;
        }
        if (token[0] == '^') {
            desugar_caret(parse_partial(strip_v(token.substr(1)), source), out);
        } else if (token[0] == '~') {
            std::string_view body{token};
            body.remove_prefix(body.size() >= 2 && body[1] == '>' ? 2 : 1);  // "~>" alias
            desugar_tilde(parse_partial(strip_v(body), source), out);
        } else {
            CompareOp op;
            std::string_view body = strip_op(token, op);
            desugar_primitive(op, parse_partial(strip_v(body), source), out, source);
        }
    }
    if (out.empty()) out.push_back(cmp(CompareOp::Ge, make(0, 0, 0)));  // "*" / empty
    return out;
}

std::vector<std::vector<Comparator>> parse_ranges(std::string_view text) {
    std::vector<std::vector<Comparator>> ranges;
    std::size_t start = 0;
    while (true) {
        const std::size_t bar = text.find("||", start);
        const std::string_view part =
            text.substr(start, bar == std::string_view::npos ? std::string_view::npos : bar - start);
        ranges.push_back(parse_conjunction(part, text));
        if (bar == std::string_view::npos) break;
        start = bar + 2;
    }
    return ranges;
}

struct Bound {
    bool set = false;
    Version v;
    bool inclusive = true;
};

// Collapses a conjunction to [lower, upper] bounds; returns false when the
// atoms cannot be represented that way (never happens for desugared atoms).
void conjunction_bounds(const std::vector<Comparator>& conj, Bound& lower, Bound& upper) {
    for (const Comparator& a : conj) {
        switch (a.op) {
        case CompareOp::Ge:
        case CompareOp::Gt: {
            const bool incl = a.op == CompareOp::Ge;
            if (!lower.set || a.version > lower.v ||
                (a.version == lower.v && lower.inclusive && !incl)) {
                lower = {true, a.version, incl};
            }
            break;
        }
        case CompareOp::Le:
        case CompareOp::Lt: {
            const bool incl = a.op == CompareOp::Le;
            if (!upper.set || a.version < upper.v ||
                (a.version == upper.v && upper.inclusive && !incl)) {
                upper = {true, a.version, incl};
            }
            break;
        }
        case CompareOp::Eq:
            if (!lower.set || a.version > lower.v) lower = {true, a.version, true};
            if (!upper.set || a.version < upper.v) upper = {true, a.version, true};
            break;
        }
    }
}

bool bounds_empty(const Bound& lower, const Bound& upper) {
    if (!lower.set || !upper.set) return false;
    const int c = Version::compare(lower.v, upper.v);
    if (c > 0) return true;
    if (c == 0 && !(lower.inclusive && upper.inclusive)) return true;
    return false;
}

bool prerelease_equal(const Version& a, const Version& b) {
    return a.prerelease == b.prerelease;
}

} // namespace

// ---------------------------------------------------------------------------
// Version
// ---------------------------------------------------------------------------

Version Version::parse(std::string_view text) {
    VersionReader r{text};
    if (!r.done() && (r.peek() == 'v' || r.peek() == 'V')) ++r.pos;
    Version v;
    v.major = r.numeric_component("major");
    if (r.peek() != '.') r.fail("expected '.'");
    ++r.pos;
    v.minor = r.numeric_component("minor");
    if (r.peek() != '.') r.fail("expected '.'");
    ++r.pos;
    v.patch = r.numeric_component("patch");
    if (r.peek() == '-') {
        ++r.pos;
        while (true) {
            v.prerelease.push_back(r.identifier(false));
            if (r.peek() == '.') { ++r.pos; continue; }
            break;
        }
    }
    if (r.peek() == '+') {
        ++r.pos;
        std::ostringstream build;
        while (true) {
            build << r.identifier(true);
            if (r.peek() == '.') {
                build << '.';
                ++r.pos;
                continue;
            }
            break;
        }
        v.build = build.str();
    }
    if (!r.done()) r.fail("trailing characters");
    return v;
}

std::optional<Version> Version::try_parse(std::string_view text) {
    try {
        return parse(text);
    } catch (const ParseError&) {
        return std::nullopt;
    }
}

std::string Version::str() const {
    std::ostringstream out;
    out << major << '.' << minor << '.' << patch;
    for (std::size_t i = 0; i < prerelease.size(); ++i) {
        out << (i == 0 ? '-' : '.') << prerelease[i];
    }
    if (!build.empty()) out << '+' << build;
    return out.str();
}

int Version::compare(const Version& a, const Version& b) {
    if (a.major != b.major) return a.major < b.major ? -1 : 1;
    if (a.minor != b.minor) return a.minor < b.minor ? -1 : 1;
    if (a.patch != b.patch) return a.patch < b.patch ? -1 : 1;
    return compare_prerelease(a.prerelease, b.prerelease);
}

// ---------------------------------------------------------------------------
// ConstraintClass
// ---------------------------------------------------------------------------

bool is_floating(ConstraintClass c) {
    return c == ConstraintClass::FloatingMajor || c == ConstraintClass::FloatingMinor ||
           c == ConstraintClass::FloatingPatch;
}

std::string_view to_string(ConstraintClass c) {
    switch (c) {
    case ConstraintClass::FloatingMajor: return "floating-major";
    case ConstraintClass::FloatingMinor: return "floating-minor";
    case ConstraintClass::FloatingPatch: return "floating-patch";
    case ConstraintClass::Pinned: return "pinned";
    case ConstraintClass::Other: return "other";
    }
    return "other";
}

std::optional<ConstraintClass> constraint_class_from_string(std::string_view name) {
    if (name == "floating-major") return ConstraintClass::FloatingMajor;
    if (name == "floating-minor") return ConstraintClass::FloatingMinor;
    if (name == "floating-patch") return ConstraintClass::FloatingPatch;
    if (name == "pinned") return ConstraintClass::Pinned;
    if (name == "other") return ConstraintClass::Other;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// VersionConstraint
// ---------------------------------------------------------------------------

VersionConstraint VersionConstraint::parse(std::string_view text, bool strict) {
    VersionConstraint c;
    c.source.assign(text);
    try {
        c.ranges = parse_ranges(text);
    } catch (const ParseError&) {
        if (strict) throw;
        c.ranges.clear();  // satisfies nothing
    }
    c.kind = classify(c);
    return c;
}

VersionConstraint VersionConstraint::exact(const Version& v) {
    VersionConstraint c;
    c.source = v.str();
    c.ranges = {{Comparator{CompareOp::Eq, v}}};
    c.kind = ConstraintClass::Pinned;
    return c;
}

bool VersionConstraint::satisfied_by(const Version& v) const { return satisfies(v, *this); }

std::optional<Version> VersionConstraint::lower_bound() const {
    if (ranges.size() != 1) return std::nullopt;
    Bound lower, upper;
    conjunction_bounds(ranges[0], lower, upper);
    if (!lower.set || !lower.inclusive) return std::nullopt;
    return lower.v;
}

bool satisfies(const Version& v, const VersionConstraint& c) {
    for (const auto& conj : c.ranges) {
        bool numeric_ok = true;
        for (const Comparator& a : conj) {
            const int cmp_result = Version::compare(v, a.version);
            bool ok = false;
            switch (a.op) {
            case CompareOp::Eq: ok = cmp_result == 0; break;
            case CompareOp::Lt: ok = cmp_result < 0; break;
            case CompareOp::Le: ok = cmp_result <= 0; break;
            case CompareOp::Gt: ok = cmp_result > 0; break;
            case CompareOp::Ge: ok = cmp_result >= 0; break;
            }
            if (!ok) {
                numeric_ok = false;
                break;
            }
        }
        if (!numeric_ok) continue;
        if (v.is_prerelease()) {
            bool allowed = false;
            for (const Comparator& a : conj) {
                if (a.version.is_prerelease() && a.version.same_triple(v)) {
                    allowed = true;
                    break;
                }
            }
            if (!allowed) continue;
        }
        return true;
    }
    return false;
}

ConstraintClass classify(const VersionConstraint& c) {
    if (c.ranges.size() != 1) return ConstraintClass::Other;
    Bound lower, upper;
    conjunction_bounds(c.ranges[0], lower, upper);
    if (bounds_empty(lower, upper)) return ConstraintClass::Other;
    if (!upper.set) return ConstraintClass::FloatingMajor;
    if (!lower.set || !lower.inclusive) return ConstraintClass::Other;

    const Version& lo = lower.v;
    const Version& hi = upper.v;
    if (upper.inclusive) {
        if (lo == hi && prerelease_equal(lo, hi)) return ConstraintClass::Pinned;
        return ConstraintClass::Other;
    }
    if (!hi.prerelease.empty()) return ConstraintClass::Other;
    if (hi.major == lo.major + 1 && hi.minor == 0 && hi.patch == 0) {
        return ConstraintClass::FloatingMinor;
    }
    if (hi.major == lo.major && hi.minor == lo.minor + 1 && hi.patch == 0) {
        return ConstraintClass::FloatingPatch;
    }
    // [v, v.patch+1) admits exactly one release version.
    if (lo.prerelease.empty() && hi.major == lo.major && hi.minor == lo.minor &&
        hi.patch == lo.patch + 1) {
        return ConstraintClass::Pinned;
    }
    return ConstraintClass::Other;
}

} // namespace pinsim
