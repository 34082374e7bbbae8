#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace collgram {

// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);
std::string sha256_file_hex(const std::filesystem::path& path);

// Digest over the sorted (relative name, content digest) pairs of every
// regular file below dir, or the file digest when path is a file.
std::string sha256_path_hex(const std::filesystem::path& path);

}  // namespace collgram
