#include "goalimagine/image.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace goalimagine {

RasterImage::RasterImage(int w, int h, Rgb fill) : width(w), height(h) {
  if (w < 0 || h < 0) throw std::invalid_argument("negative image dimensions");
  pixels.resize(3 * static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
  for (std::size_t i = 0; i < pixels.size(); i += 3) {
    pixels[i] = fill[0];
    pixels[i + 1] = fill[1];
    pixels[i + 2] = fill[2];
  }
}

DepthImage::DepthImage(int w, int h)
    : width(w), height(h),
      depth(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), std::numeric_limits<double>::infinity()) {}

namespace {

// Netpbm header: magic, whitespace-separated width/height/maxval, one whitespace byte.
struct PnmHeader {
  int width;
  int height;
  std::size_t data_offset;
};

PnmHeader parse_pnm_header(std::string_view bytes, std::string_view magic) {
  if (bytes.substr(0, 2) != magic) throw ImageFormatError("expected " + std::string(magic) + " image");
  std::size_t pos = 2;
  auto next_int = [&]() {
    while (pos < bytes.size()) {
      if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else {
        break;
      }
    }
    if (pos >= bytes.size() || !std::isdigit(static_cast<unsigned char>(bytes[pos])))
      throw ImageFormatError("malformed netpbm header");
    long value = 0;
    while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
      value = value * 10 + (bytes[pos] - '0');
      if (value > 1'000'000) throw ImageFormatError("netpbm dimension too large");
      ++pos;
    }
    return static_cast<int>(value);
  };
  const int w = next_int();
  const int h = next_int();
  const int maxval = next_int();
  if (maxval != 255) throw ImageFormatError("only maxval 255 is supported");
  if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos])))
    throw ImageFormatError("malformed netpbm header");
  return {w, h, pos + 1};
}

}  // namespace

std::string encode_ppm(const RasterImage& image) {
  std::string out = "P6\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(image.pixels.data()), image.pixels.size());
  return out;
}

RasterImage decode_ppm(std::string_view bytes) {
  const auto hdr = parse_pnm_header(bytes, "P6");
  const std::size_t n = 3 * static_cast<std::size_t>(hdr.width) * hdr.height;
  if (bytes.size() - hdr.data_offset != n) throw ImageFormatError("P6 payload size mismatch");
  RasterImage img(hdr.width, hdr.height);
  std::memcpy(img.pixels.data(), bytes.data() + hdr.data_offset, n);
  return img;
}

std::string encode_pgm(const EdgeMap& edges) {
  std::string out = "P5\n" + std::to_string(edges.width) + " " + std::to_string(edges.height) + "\n255\n";
  out.reserve(out.size() + edges.bits.size());
  for (auto b : edges.bits) out.push_back(b != 0 ? static_cast<char>(255) : '\0');
  return out;
}

EdgeMap decode_pgm(std::string_view bytes) {
  const auto hdr = parse_pnm_header(bytes, "P5");
  const std::size_t n = static_cast<std::size_t>(hdr.width) * hdr.height;
  if (bytes.size() - hdr.data_offset != n) throw ImageFormatError("P5 payload size mismatch");
  EdgeMap edges(hdr.width, hdr.height);
  for (std::size_t i = 0; i < n; ++i) {
    const auto v = static_cast<unsigned char>(bytes[hdr.data_offset + i]);
    if (v != 0 && v != 255) throw ImageFormatError("edge map values must be 0 or 255");
    edges.bits[i] = v != 0 ? 1 : 0;
  }
  return edges;
}

namespace {

void put_u32_le(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint32_t get_u32_le(std::string_view in, std::size_t pos) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  return v;
}

}  // namespace

std::string encode_depth(const DepthImage& depth) {
  std::string out = "IMGD";
  put_u32_le(out, static_cast<std::uint32_t>(depth.width));
  put_u32_le(out, static_cast<std::uint32_t>(depth.height));
  put_u32_le(out, 0);
  out.reserve(out.size() + 4 * depth.depth.size());
  for (double d : depth.depth) put_u32_le(out, std::bit_cast<std::uint32_t>(static_cast<float>(d)));
  return out;
}

DepthImage decode_depth(std::string_view bytes) {
  if (bytes.size() < 16 || bytes.substr(0, 4) != "IMGD") throw ImageFormatError("expected IMGD depth file");
  const auto w = get_u32_le(bytes, 4);
  const auto h = get_u32_le(bytes, 8);
  if (bytes.size() != 16 + 4 * static_cast<std::size_t>(w) * h) throw ImageFormatError("IMGD payload size mismatch");
  DepthImage img(static_cast<int>(w), static_cast<int>(h));
  for (std::size_t i = 0; i < img.depth.size(); ++i) {
    img.depth[i] = std::bit_cast<float>(get_u32_le(bytes, 16 + 4 * i));
  }
  return img;
}

void write_file(const std::string& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void draw_box(RasterImage& image, int x0, int y0, int x1, int y1, Rgb color, int thickness) {
  for (int y = std::max(y0, 0); y < std::min(y1, image.height); ++y) {
    for (int x = std::max(x0, 0); x < std::min(x1, image.width); ++x) {
      const bool border = x < x0 + thickness || x >= x1 - thickness || y < y0 + thickness || y >= y1 - thickness;
      if (border) image.set(x, y, color);
    }
  }
}

}  // namespace goalimagine
