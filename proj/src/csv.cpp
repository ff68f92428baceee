#include "pinsim/csv.hpp"

#include "pinsim/error.hpp"

#include <istream>
#include <ostream>

namespace pinsim::csv {

std::string escape(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

namespace {

template <typename Range>
void write_row_impl(std::ostream& out, const Range& fields) {
    bool first = true;
    for (const std::string& f : fields) {
        if (!first) out << ',';
        out << escape(f);
        first = false;
    }
    out << '\n';
}

} // namespace

void write_row(std::ostream& out, std::initializer_list<std::string> fields) {
    write_row_impl(out, fields);
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
    write_row_impl(out, fields);
}

std::vector<std::string> parse_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    std::size_t i = 0;
    while (i < line.size()) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                current += c;
            }
        } else if (c == '"' && current.empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(current));
            current.clear();
        } else if (c == '\r') {
            // drop
        } else {
            current += c;
        }
        ++i;
    }
    if (quoted) throw ParseError("unterminated quote in CSV line", i);
    fields.push_back(std::move(current));
    return fields;
}

std::vector<std::vector<std::string>> read_all(std::istream& in) {
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        rows.push_back(parse_line(line));
    }
    return rows;
}

} // namespace pinsim::csv
