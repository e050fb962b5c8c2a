#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace aix::io {

std::string read_file(const std::filesystem::path& path);

// Writes through a sibling temp file and renames it into place.
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace aix::io
