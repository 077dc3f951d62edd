#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "goalimagine/scene.hpp"

namespace goalimagine {

class ImageFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Row-major RGB, 8 bits per channel.
struct RasterImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // 3 * width * height

  RasterImage() = default;
  RasterImage(int w, int h, Rgb fill = {0, 0, 0});

  Rgb at(int x, int y) const {
    const auto i = index(x, y);
    return {pixels[i], pixels[i + 1], pixels[i + 2]};
  }
  void set(int x, int y, Rgb c) {
    const auto i = index(x, y);
    pixels[i] = c[0];
    pixels[i + 1] = c[1];
    pixels[i + 2] = c[2];
  }
  bool operator==(const RasterImage&) const = default;

 private:
  std::size_t index(int x, int y) const {
    return 3 * (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x));
  }
};

/// Euclidean range along each pixel ray, meters; +infinity where nothing was hit.
struct DepthImage {
  int width = 0;
  int height = 0;
  std::vector<double> depth;

  DepthImage() = default;
  DepthImage(int w, int h);

  double at(int x, int y) const { return depth[static_cast<std::size_t>(y) * width + x]; }
  double& at(int x, int y) { return depth[static_cast<std::size_t>(y) * width + x]; }
};

/// Single-channel floating-point image used inside the edge pipeline.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  GrayImage() = default;
  GrayImage(int w, int h, double fill = 0.0)
      : width(w), height(h), values(static_cast<std::size_t>(w) * h, fill) {}

  double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
  double& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
};

/// Binary edge image; bits are 0 or 1.
struct EdgeMap {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;

  EdgeMap() = default;
  EdgeMap(int w, int h) : width(w), height(h), bits(static_cast<std::size_t>(w) * h, 0) {}

  std::uint8_t at(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t& at(int x, int y) { return bits[static_cast<std::size_t>(y) * width + x]; }
  bool operator==(const EdgeMap&) const = default;
};

// Binary P6 / P5 / IMGD encodings. The byte strings are the exact file contents.
std::string encode_ppm(const RasterImage& image);
RasterImage decode_ppm(std::string_view bytes);
std::string encode_pgm(const EdgeMap& edges);
EdgeMap decode_pgm(std::string_view bytes);
std::string encode_depth(const DepthImage& depth);
DepthImage decode_depth(std::string_view bytes);

void write_file(const std::string& path, std::string_view bytes);
std::string read_file(const std::string& path);

/// Draws a `thickness`-pixel border just inside [x0,x1)×[y0,y1), clipped to the image.
void draw_box(RasterImage& image, int x0, int y0, int x1, int y1, Rgb color, int thickness = 2);

}  // namespace goalimagine
