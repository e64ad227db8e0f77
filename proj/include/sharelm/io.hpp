#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sharelm {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Writes to a sibling temp file, flushes, then renames over `path`.
/// On failure the temp file is removed and `path` is left untouched.
void write_file_atomically(const std::filesystem::path& path, std::string_view contents);

std::string read_file(const std::filesystem::path& path);

/// Splits on '\n', dropping a trailing '\r' and skipping blank lines.
std::vector<std::string> read_lines(const std::filesystem::path& path);

}  // namespace sharelm
