#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace driftcurate::io {

std::string read_binary_file(const std::filesystem::path& path);

// Writes to "<path>.tmp" and renames, so a failed run never leaves a
// partial primary output behind.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

}  // namespace driftcurate::io
