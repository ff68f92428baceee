#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace pinsim {

// UTC timestamps are plain epoch seconds throughout the library.

// Parses an RFC 3339 timestamp ("2022-09-12T00:00:00Z", fractional seconds
// truncated, numeric offsets honored). Throws ParseError on malformed input.
std::int64_t parse_rfc3339(std::string_view text);

// Formats epoch seconds as "YYYY-MM-DDTHH:MM:SSZ".
std::string format_rfc3339(std::int64_t epoch_seconds);

inline constexpr std::int64_t kSecondsPerDay = 86400;

} // namespace pinsim
