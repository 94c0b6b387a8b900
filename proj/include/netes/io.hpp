#pragma once

#include <string>
#include <string_view>

namespace netes {

// Writes `content` to `<path>.tmp` and renames it over `path`. Throws IoError.
void write_file_atomic(const std::string& path, std::string_view content);

std::string read_file(const std::string& path);

// Shortest round-trip decimal form of a double ("nan"/"inf" for non-finite).
std::string format_double(double x);

}  // namespace netes
