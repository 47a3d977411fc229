#ifndef UNIQODE_IO_HPP
#define UNIQODE_IO_HPP

#include <string>

namespace uniqode::io {

// Writes to a temporary file in the same directory, then renames into place,
// so a failed command never leaves partial output behind.
void atomic_write_file(const std::string& path, const std::string& contents);

std::string read_file(const std::string& path);

}  // namespace uniqode::io

#endif
