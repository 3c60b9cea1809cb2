#include "common/files.hpp"

#include <fstream>
#include <iterator>

#include "common/error.hpp"

namespace webprobe::files {
namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path.string());
  return out;
}

}  // namespace

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot read " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  auto s = read_text(path);
  return {s.begin(), s.end()};
}

void write_text(const std::filesystem::path& path, std::string_view contents) {
  auto out = open_for_write(path);
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
}

void write_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> contents) {
  auto out = open_for_write(path);
  out.write(reinterpret_cast<const char*>(contents.data()),
            static_cast<std::streamsize>(contents.size()));
}

}  // namespace webprobe::files
