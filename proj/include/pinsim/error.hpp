#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pinsim {

// Error categories surfaced across the library. The C API maps these onto
// status codes, so every throwing path should use pinsim::Error.
enum class errc {
    parse_error,
    duplicate_release,
    unknown_package,
    unresolvable_requirement,
    invalid_config,
    rank_deficient,
    too_few_groups,
    missing_maintainer_data,
    empty_target_set,
    zero_downloads,
    domain_error,
    io_error,
    data_error,
};

class Error : public std::runtime_error {
public:
    Error(errc code, std::string message)
        : std::runtime_error(std::move(message)), code_(code) {}

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

// Parse failures carry the byte offset (for grammar errors) or the
// one-based line number (for record streams) of the offending input.
class ParseError : public Error {
public:
    ParseError(std::string message, std::size_t offset)
        : Error(errc::parse_error, std::move(message)), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

[[noreturn]] inline void throw_error(errc code, std::string message) {
    throw Error(code, std::move(message));
}

} // namespace pinsim
