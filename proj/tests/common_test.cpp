#include <gtest/gtest.h>

#include "common/clock.hpp"
#include "common/error.hpp"
#include "common/files.hpp"
#include "common/png.hpp"
#include "common/text.hpp"
#include "support.hpp"

using namespace webprobe;

TEST(TextTest, WhitespaceHelpers) {
  EXPECT_EQ(text::trim("  a b \n"), "a b");
  EXPECT_EQ(text::collapse_whitespace(" a \n\t b  c "), "a b c");
  EXPECT_EQ(text::to_lower("MiXeD"), "mixed");
  EXPECT_TRUE(text::contains_icase("Blocked by CORS policy", "cors"));
  EXPECT_EQ(text::split_lines("a\nb\r\nc"), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(text::tokenize("New-project: APL_1"), (std::vector<std::string>{"new", "project", "apl", "1"}));
  EXPECT_EQ(text::replace_all("{{x}}-{{x}}", "{{x}}", "y"), "y-y");
}

TEST(TextTest, KnownDigests) {
  EXPECT_EQ(text::fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(text::fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(text::sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  std::string foobar = "foobar";
  std::vector<std::uint8_t> bytes(foobar.begin(), foobar.end());
  EXPECT_EQ(text::base64_encode(bytes), "Zm9vYmFy");
  EXPECT_EQ(text::base64_decode("Zm9vYmE="), std::vector<std::uint8_t>(bytes.begin(), bytes.end() - 1));
}

TEST(PngTest, RoundTripKeepsPixelsAndText) {
  png::Image img;
  img.width = 3;
  img.height = 2;
  img.rgb = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18};
  img.text["Page"] = "home";
  auto bytes = png::encode(img);
  ASSERT_TRUE(png::is_png(bytes));
  auto back = png::decode(bytes);
  EXPECT_EQ(back.width, 3u);
  EXPECT_EQ(back.height, 2u);
  EXPECT_EQ(back.rgb, img.rgb);
  EXPECT_EQ(back.text.at("Page"), "home");
  std::vector<std::uint8_t> junk{1, 2, 3};
  EXPECT_FALSE(png::is_png(junk));
  EXPECT_THROW(png::decode(junk), Error);
}

TEST(ClockTest, VirtualClockOnlyMovesForward) {
  VirtualClock c(100);
  c.sleep_until(50);
  EXPECT_EQ(c.now_ms(), 100);
  c.charge(25);
  c.sleep_until(200);
  EXPECT_EQ(c.now_ms(), 200);
  EXPECT_TRUE(c.is_virtual());
  SteadyClock s;
  auto before = s.now_ms();
  s.charge(100000);
  EXPECT_LT(s.now_ms() - before, 1000);
}

TEST(FilesTest, WriteCreatesParentsAndReadsBack) {
  wpt::TempDir dir;
  auto p = dir.path() / "a" / "b" / "c.txt";
  files::write_text(p, "hello");
  EXPECT_EQ(files::read_text(p), "hello");
  try {
    files::read_text(dir.path() / "missing");
    FAIL() << "expected io_error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::io_error);
  }
}
