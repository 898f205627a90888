#pragma once

#include <filesystem>
#include <string>

namespace eigenlocal {

/// Writes to a sibling temp file and renames it over `path`. Throws IoError.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

/// Whole file as a string. Throws MissingInputError when absent, IoError on read failure.
std::string read_file(const std::filesystem::path& path);

}  // namespace eigenlocal
