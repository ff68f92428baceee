#include "pinsim/io.hpp"

#include "pinsim/error.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <system_error>
#include <unistd.h>

namespace pinsim {

void write_file_atomic(const std::string& path,
                       const std::function<void(std::ostream&)>& writer) {
    namespace fs = std::filesystem;
    const std::string tmp = path + ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw_error(errc::io_error, "cannot open for writing: " + tmp);
        writer(out);
        out.flush();
        if (!out) {
            std::remove(tmp.c_str());
            throw_error(errc::io_error, "write failed: " + tmp);
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        std::remove(tmp.c_str());
        throw_error(errc::io_error, "rename failed: " + path + " (" + ec.message() + ")");
    }
}

} // namespace pinsim
