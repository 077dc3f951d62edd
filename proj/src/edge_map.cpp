#include "goalimagine/edge_map.hpp"

#include <algorithm>
#include <cmath>

#include "goalimagine/geometry.hpp"

namespace goalimagine {

void validate(const CannyParams& params) {
  if (!(params.sigma > 0.0)) throw EdgeMapError("canny sigma must be > 0");
  if (params.kernel_radius < 1) throw EdgeMapError("canny kernel_radius must be >= 1");
  if (!(params.low >= 0.0 && params.low < params.high)) throw EdgeMapError("canny thresholds need 0 <= low < high");
}

std::vector<double> gaussian_kernel(double sigma, int radius) {
  if (!(sigma > 0.0)) throw EdgeMapError("gaussian sigma must be > 0");
  if (radius < 1) throw EdgeMapError("gaussian radius must be >= 1");
  std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (int x = -radius; x <= radius; ++x) {
    const double v = std::exp(-(x * x) / (2.0 * sigma * sigma));
    k[static_cast<std::size_t>(x + radius)] = v;
    sum += v;
  }
  for (auto& v : k) v /= sum;
  // Mirror so the kernel is exactly symmetric.
  for (int x = 1; x <= radius; ++x) k[static_cast<std::size_t>(radius + x)] = k[static_cast<std::size_t>(radius - x)];
  return k;
}

GrayImage to_gray(const RasterImage& raster) {
  GrayImage g(raster.width, raster.height);
  for (int y = 0; y < raster.height; ++y) {
    for (int x = 0; x < raster.width; ++x) {
      const Rgb c = raster.at(x, y);
      g.at(x, y) = 0.299 * c[0] + 0.587 * c[1] + 0.114 * c[2];
    }
  }
  return g;
}

GrayImage gaussian_blur(const GrayImage& gray, const std::vector<double>& kernel) {
  const int r = static_cast<int>(kernel.size() / 2);
  const int w = gray.width;
  const int h = gray.height;
  GrayImage tmp(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -r; k <= r; ++k) acc += kernel[static_cast<std::size_t>(k + r)] * gray.at(std::clamp(x + k, 0, w - 1), y);
      tmp.at(x, y) = acc;
    }
  }
  GrayImage out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -r; k <= r; ++k) acc += kernel[static_cast<std::size_t>(k + r)] * tmp.at(x, std::clamp(y + k, 0, h - 1));
      out.at(x, y) = acc;
    }
  }
  return out;
}

Gradients sobel_gradients(const GrayImage& gray) {
  const int w = gray.width;
  const int h = gray.height;
  if (w < 3 || h < 3) throw EdgeMapError("sobel needs an image of at least 3x3 pixels");
  Gradients g{GrayImage(w, h), GrayImage(w, h), GrayImage(w, h), GrayImage(w, h)};
  auto p = [&](int x, int y) { return gray.at(std::clamp(x, 0, w - 1), std::clamp(y, 0, h - 1)); };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double gx = (p(x + 1, y - 1) - p(x - 1, y - 1)) + 2.0 * (p(x + 1, y) - p(x - 1, y)) +
                        (p(x + 1, y + 1) - p(x - 1, y + 1));
      const double gy = (p(x - 1, y + 1) - p(x - 1, y - 1)) + 2.0 * (p(x, y + 1) - p(x, y - 1)) +
                        (p(x + 1, y + 1) - p(x + 1, y - 1));
      g.gx.at(x, y) = gx;
      g.gy.at(x, y) = gy;
      g.magnitude.at(x, y) = std::sqrt(gx * gx + gy * gy);
      g.orientation.at(x, y) = std::atan2(gy, gx);
    }
  }
  return g;
}

int orientation_bin(double theta) {
  double deg = theta * 180.0 / kPi;
  if (deg < 0.0) deg += 180.0;
  if (deg >= 180.0) deg -= 180.0;
  if (deg <= 22.5) return 0;
  if (deg <= 67.5) return 45;
  if (deg <= 112.5) return 90;
  if (deg <= 157.5) return 135;
  return 0;
}

GrayImage non_max_suppression(const Gradients& grad) {
  const auto& mag = grad.magnitude;
  const int w = mag.width;
  const int h = mag.height;
  GrayImage out(w, h);
  auto m = [&](int x, int y) { return mag.at(std::clamp(x, 0, w - 1), std::clamp(y, 0, h - 1)); };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double c = mag.at(x, y);
      if (c == 0.0) continue;
      // Image rows grow downwards, so a 45° gradient points towards (+x, +y).
      int dx = 1;
      int dy = 0;
      switch (orientation_bin(grad.orientation.at(x, y))) {
        case 0: dx = 1; dy = 0; break;
        case 45: dx = 1; dy = 1; break;
        case 90: dx = 0; dy = 1; break;
        default: dx = -1; dy = 1; break;
      }
      if (m(x + dx, y + dy) > c || m(x - dx, y - dy) > c) continue;
      out.at(x, y) = c;
    }
  }
  return out;
}

EdgeMap hysteresis(const GrayImage& thinned, double low, double high) {
  const int w = thinned.width;
  const int h = thinned.height;
  EdgeMap edges(w, h);
  std::vector<std::pair<int, int>> stack;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (thinned.at(x, y) >= high && edges.at(x, y) == 0) {
        edges.at(x, y) = 1;
        stack.emplace_back(x, y);
      }
    }
  }
  while (!stack.empty()) {
    const auto [x, y] = stack.back();
    stack.pop_back();
    for (int ny = std::max(0, y - 1); ny <= std::min(h - 1, y + 1); ++ny) {
      for (int nx = std::max(0, x - 1); nx <= std::min(w - 1, x + 1); ++nx) {
        if (edges.at(nx, ny) == 0 && thinned.at(nx, ny) > 0.0 && thinned.at(nx, ny) >= low) {
          edges.at(nx, ny) = 1;
          stack.emplace_back(nx, ny);
        }
      }
    }
  }
  return edges;
}

EdgeMap canny(const RasterImage& raster, const CannyParams& params) {
  validate(params);
  const auto blurred = gaussian_blur(to_gray(raster), gaussian_kernel(params.sigma, params.kernel_radius));
  return hysteresis(non_max_suppression(sobel_gradients(blurred)), params.low, params.high);
}

}  // namespace goalimagine
