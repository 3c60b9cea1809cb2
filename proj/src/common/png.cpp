#include "common/png.hpp"

#include <png.h>

#include <cstring>

#include "common/error.hpp"

namespace webprobe::png {
namespace {

struct ReadCursor {
  std::span<const std::uint8_t> bytes;
  std::size_t offset = 0;
};

void write_to_vector(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + length);
}

void flush_noop(png_structp) {}

void read_from_span(png_structp png, png_bytep data, png_size_t length) {
  auto* cur = static_cast<ReadCursor*>(png_get_io_ptr(png));
  if (cur->offset + length > cur->bytes.size()) png_error(png, "truncated PNG");
  std::memcpy(data, cur->bytes.data() + cur->offset, length);
  cur->offset += length;
}

[[noreturn]] void on_error(png_structp png, png_const_charp message) {
  auto* msg = static_cast<std::string*>(png_get_error_ptr(png));
  if (msg) *msg = message;
  png_longjmp(png, 1);
}

void on_warning(png_structp, png_const_charp) {}

}  // namespace

std::vector<std::uint8_t> encode(const Image& image) {
  if (image.width == 0 || image.height == 0 ||
      image.rgb.size() != std::size_t{image.width} * image.height * 3)
    throw Error(ErrorCode::invalid_argument, "png: pixel buffer does not match dimensions");

  std::string message;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &message, on_error, on_warning);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorCode::io_error, "png: out of memory");
  }
  std::vector<std::uint8_t> out;
  // Text chunk storage must outlive png_write_info.
  std::vector<png_text> chunks;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorCode::io_error, "png encode failed: " + message);
  }
  png_set_write_fn(png, &out, write_to_vector, flush_noop);
  png_set_IHDR(png, info, image.width, image.height, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  for (const auto& [key, value] : image.text) {
    png_text t{};
    t.compression = PNG_TEXT_COMPRESSION_NONE;
    t.key = const_cast<char*>(key.c_str());
    t.text = const_cast<char*>(value.c_str());
    t.text_length = value.size();
    chunks.push_back(t);
  }
  if (!chunks.empty()) png_set_text(png, info, chunks.data(), static_cast<int>(chunks.size()));
  png_write_info(png, info);
  for (std::uint32_t y = 0; y < image.height; ++y) {
    png_write_row(png, const_cast<png_bytep>(image.rgb.data() + std::size_t{y} * image.width * 3));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

Image decode(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0)
    throw Error(ErrorCode::invalid_argument, "png: bad signature");

  std::string message;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &message, on_error, on_warning);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorCode::io_error, "png: out of memory");
  }
  ReadCursor cursor{bytes, 0};
  Image image;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorCode::invalid_argument, "png decode failed: " + message);
  }
  png_set_read_fn(png, &cursor, read_from_span);
  png_read_info(png, info);
  png_set_expand(png);
  png_set_strip_16(png);
  png_set_strip_alpha(png);
  png_set_gray_to_rgb(png);
  png_read_update_info(png, info);
  image.width = png_get_image_width(png, info);
  image.height = png_get_image_height(png, info);
  image.rgb.resize(std::size_t{image.width} * image.height * 3);
  rows.resize(image.height);
  for (std::uint32_t y = 0; y < image.height; ++y)
    rows[y] = image.rgb.data() + std::size_t{y} * image.width * 3;
  png_read_image(png, rows.data());
  png_read_end(png, info);
  png_textp text = nullptr;
  int count = png_get_text(png, info, &text, nullptr);
  for (int i = 0; i < count; ++i)
    image.text[text[i].key] = std::string(text[i].text, text[i].text_length);
  png_destroy_read_struct(&png, &info, nullptr);
  return image;
}

bool is_png(std::span<const std::uint8_t> bytes) noexcept {
  try {
    decode(bytes);
    return true;
  } catch (...) {
    return false;
  }
}

}  // namespace webprobe::png
