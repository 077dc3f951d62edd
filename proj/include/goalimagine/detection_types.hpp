#pragma once

#include <string>

namespace goalimagine {

/// Pixel rectangle [x_min, x_max) × [y_min, y_max).
struct BBox {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  bool operator==(const BBox&) const = default;
};

struct Detection {
  std::string label;
  BBox bbox;
  double confidence = 0.0;
  int candidate_index = 0;
};

/// Detection invariants for an image of the given size.
inline bool bbox_valid(const BBox& b, int width, int height) {
  return 0.0 <= b.x_min && b.x_min < b.x_max && b.x_max <= width && 0.0 <= b.y_min && b.y_min < b.y_max &&
         b.y_max <= height;
}

}  // namespace goalimagine
