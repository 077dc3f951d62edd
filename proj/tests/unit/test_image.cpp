#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <limits>

#include "goalimagine/base64.hpp"
#include "goalimagine/image.hpp"

using namespace goalimagine;

TEST(Ppm, ExactBytes) {
  RasterImage img(2, 1);
  img.set(0, 0, {1, 2, 3});
  img.set(1, 0, {255, 0, 128});
  EXPECT_EQ(encode_ppm(img), std::string("P6\n2 1\n255\n\x01\x02\x03\xff\x00\x80", 17));
}

TEST(Ppm, RoundTrip) {
  RasterImage img(5, 3);
  for (int y = 0; y < 3; ++y)
    for (int x = 0; x < 5; ++x) img.set(x, y, {std::uint8_t(x * 40), std::uint8_t(y * 70), std::uint8_t(x + y)});
  EXPECT_EQ(decode_ppm(encode_ppm(img)), img);
}

TEST(Ppm, AcceptsCommentsAndRejectsBadInput) {
  const std::string with_comment = std::string("P6\n# made by hand\n1 1\n255\n", 26) + std::string("\x0a\x0b\x0c", 3);
  EXPECT_EQ(decode_ppm(with_comment).at(0, 0), (Rgb{10, 11, 12}));
  EXPECT_THROW(decode_ppm("P5\n1 1\n255\n\x00"), ImageFormatError);
  EXPECT_THROW(decode_ppm("P6\n2 2\n255\nabc"), ImageFormatError);
  EXPECT_THROW(decode_ppm("P6\n1 1\n65535\nabcdef"), ImageFormatError);
  EXPECT_THROW(decode_ppm("P6\nx y\n255\n"), ImageFormatError);
}

TEST(Pgm, EdgeBitsMapTo0And255) {
  EdgeMap e(3, 1);
  e.at(1, 0) = 1;
  EXPECT_EQ(encode_pgm(e), std::string("P5\n3 1\n255\n\x00\xff\x00", 14));
  EXPECT_EQ(decode_pgm(encode_pgm(e)), e);
  EXPECT_THROW(decode_pgm(std::string("P5\n1 1\n255\n\x07", 12)), ImageFormatError);
}

TEST(Depth, HeaderAndRoundTrip) {
  DepthImage d(3, 2);
  d.at(0, 0) = 1.5;
  d.at(2, 1) = 0.25;
  const std::string bytes = encode_depth(d);
  ASSERT_EQ(bytes.size(), 16u + 4u * 6u);
  EXPECT_EQ(bytes.substr(0, 4), "IMGD");
  std::uint32_t w, h, reserved;
  std::memcpy(&w, bytes.data() + 4, 4);
  std::memcpy(&h, bytes.data() + 8, 4);
  std::memcpy(&reserved, bytes.data() + 12, 4);
  EXPECT_EQ(w, 3u);
  EXPECT_EQ(h, 2u);
  EXPECT_EQ(reserved, 0u);
  float first;
  std::memcpy(&first, bytes.data() + 16, 4);
  EXPECT_EQ(first, 1.5f);

  const DepthImage back = decode_depth(bytes);
  EXPECT_EQ(back.at(0, 0), 1.5);
  EXPECT_EQ(back.at(2, 1), 0.25);
  EXPECT_TRUE(std::isinf(back.at(1, 0)));
  EXPECT_THROW(decode_depth(bytes.substr(0, 20)), ImageFormatError);
  EXPECT_THROW(decode_depth("JUNK" + bytes.substr(4)), ImageFormatError);
}

TEST(Files, WriteThenRead) {
  const auto path = (std::filesystem::temp_directory_path() / "goalimagine_image_test.bin").string();
  const std::string payload("a\0b\xff", 4);
  write_file(path, payload);
  EXPECT_EQ(read_file(path), payload);
  std::filesystem::remove(path);
  EXPECT_THROW(read_file(path), std::runtime_error);
}

TEST(DrawBox, TwoPixelBorderInsideBox) {
  RasterImage img(10, 10, {0, 0, 0});
  draw_box(img, 2, 2, 8, 8, {255, 0, 0}, 2);
  int red = 0;
  for (int y = 0; y < 10; ++y)
    for (int x = 0; x < 10; ++x) red += img.at(x, y)[0] == 255;
  EXPECT_EQ(red, 36 - 4);  // 6x6 box minus its 2x2 interior
  EXPECT_EQ(img.at(2, 2)[0], 255);
  EXPECT_EQ(img.at(3, 3)[0], 255);
  EXPECT_EQ(img.at(4, 4)[0], 0);
  EXPECT_EQ(img.at(8, 8)[0], 0);
  draw_box(img, -5, -5, 30, 30, {0, 255, 0}, 2);  // clipped, must not crash
  EXPECT_EQ(img.at(0, 0)[1], 0);
}

TEST(Base64, KnownVectors) {
  EXPECT_EQ(base64_encode(""), "");
  EXPECT_EQ(base64_encode("f"), "Zg==");
  EXPECT_EQ(base64_encode("fo"), "Zm8=");
  EXPECT_EQ(base64_encode("foobar"), "Zm9vYmFy");
  EXPECT_EQ(base64_decode("Zm9vYg=="), "foob");
  const std::string bin("\x00\xff\x10\x80", 4);
  EXPECT_EQ(base64_decode(base64_encode(bin)), bin);
  EXPECT_THROW(base64_decode("Zm9"), std::invalid_argument);
  EXPECT_THROW(base64_decode("Zm=v"), std::invalid_argument);
  EXPECT_THROW(base64_decode("Zm9*"), std::invalid_argument);
}
