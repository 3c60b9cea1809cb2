#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace webprobe::png {

struct Image {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<std::uint8_t> rgb;  // row-major, 3 bytes per pixel
  std::map<std::string, std::string> text;  // tEXt chunks
};

std::vector<std::uint8_t> encode(const Image& image);
/// Throws Error{invalid_argument} if the bytes are not a decodable PNG.
Image decode(std::span<const std::uint8_t> bytes);
bool is_png(std::span<const std::uint8_t> bytes) noexcept;

}  // namespace webprobe::png
