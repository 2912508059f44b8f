#pragma once

#include <string>

namespace failsafe {

// 17 significant digits, enough for an exact double round trip.
std::string format_double(double v);

// Writes to `path`.tmp then renames over `path`.
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

} // namespace failsafe
