#pragma once

#include <functional>
#include <iosfwd>
#include <string>

namespace pinsim {

// Writes a file atomically: content goes to a sibling temp file which is
// renamed over the destination only after a successful flush. Throws
// Error(io_error) on failure.
void write_file_atomic(const std::string& path,
                       const std::function<void(std::ostream&)>& writer);

} // namespace pinsim
