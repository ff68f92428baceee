#pragma once

#include <initializer_list>
#include <iosfwd>
#include <string>
#include <vector>

namespace pinsim::csv {

// Minimal RFC 4180 style CSV support: fields containing commas, quotes or
// newlines are quoted; everything else is written raw.

std::string escape(const std::string& field);
void write_row(std::ostream& out, std::initializer_list<std::string> fields);
void write_row(std::ostream& out, const std::vector<std::string>& fields);

// Splits one line into fields, honoring quotes. Throws ParseError on
// unterminated quotes.
std::vector<std::string> parse_line(const std::string& line);

// Reads all rows (header included) from a stream, skipping blank lines.
std::vector<std::vector<std::string>> read_all(std::istream& in);

} // namespace pinsim::csv
