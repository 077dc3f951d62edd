#pragma once

#include <stdexcept>
#include <vector>

#include "goalimagine/image.hpp"

namespace goalimagine {

class EdgeMapError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct CannyParams {
  double sigma = 1.4;
  int kernel_radius = 2;
  double low = 50.0;
  double high = 100.0;
};

void validate(const CannyParams& params);

/// Normalized samples of exp(-x²/2σ²) for x in [-radius, radius].
std::vector<double> gaussian_kernel(double sigma, int radius);

/// Luma: 0.299 R + 0.587 G + 0.114 B.
GrayImage to_gray(const RasterImage& raster);

/// Separable blur, horizontal pass then vertical pass, replicated borders.
GrayImage gaussian_blur(const GrayImage& gray, const std::vector<double>& kernel);

struct Gradients {
  GrayImage magnitude;
  GrayImage orientation;  // atan2(gy, gx), radians
  GrayImage gx;
  GrayImage gy;
};

/// 3×3 Sobel with replicated borders. Requires at least 3×3 pixels.
Gradients sobel_gradients(const GrayImage& gray);

/// NMS direction bin for an orientation: 0, 45, 90 or 135 degrees
/// (nearest bin, ties to the lower angle).
int orientation_bin(double theta);

/// Magnitudes surviving non-maximum suppression (suppressed pixels are 0).
GrayImage non_max_suppression(const Gradients& grad);

/// Double threshold plus 8-connected hysteresis over a thinned magnitude image.
EdgeMap hysteresis(const GrayImage& thinned, double low, double high);

EdgeMap canny(const RasterImage& raster, const CannyParams& params = {});

}  // namespace goalimagine
