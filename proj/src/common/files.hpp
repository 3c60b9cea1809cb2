#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace webprobe::files {

/// Throws Error{io_error} when the file cannot be opened.
std::string read_text(const std::filesystem::path& path);
std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path);
/// Creates parent directories as needed.
void write_text(const std::filesystem::path& path, std::string_view contents);
void write_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> contents);

}  // namespace webprobe::files
