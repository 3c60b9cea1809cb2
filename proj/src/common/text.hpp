#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace webprobe::text {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);
/// Collapses every run of whitespace (including newlines) into one space and trims.
std::string collapse_whitespace(std::string_view s);
std::vector<std::string> split_lines(std::string_view s);
bool contains_icase(std::string_view haystack, std::string_view needle);
/// Lower-cased alphanumeric tokens; every other character separates tokens.
std::vector<std::string> tokenize(std::string_view s);
std::string replace_all(std::string s, std::string_view from, std::string_view to);

/// FNV-1a, 64 bit. Stable across platforms and runs.
std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t value);

std::string base64_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> base64_decode(std::string_view encoded);
std::string sha256_hex(std::string_view data);

}  // namespace webprobe::text
