#pragma once

#include <string>

namespace conic {

// Writes to "<path>.tmp.<pid>" and renames over path.
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

}  // namespace conic
