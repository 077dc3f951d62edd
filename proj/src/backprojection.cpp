#include "goalimagine/backprojection.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace goalimagine {

Vec3 pixel_ray(const Intrinsics& intr, const Vec2& pixel) {
  return Vec3((pixel.x() - intr.cx) / intr.f, (pixel.y() - intr.cy) / intr.f, 1.0).normalized();
}

Vec3 pixel_to_world(const CameraModel& camera, const Vec2& pixel, double range_m) {
  if (!std::isfinite(range_m) || range_m <= 0.0) throw BackprojectionError("no surface at pixel");
  const Vec3 ray = camera.pose.rotate(pixel_ray(camera.intrinsics(), pixel));
  return camera.position() + range_m * ray;
}

std::optional<PixelProjection> project_to_pixel(const CameraModel& camera, const Vec3& world) {
  const Vec3 local = camera.pose.inverse().transform_point(world);
  if (local.z() <= 0.0) return std::nullopt;
  const Intrinsics intr = camera.intrinsics();
  return PixelProjection{{intr.f * local.x() / local.z() + intr.cx, intr.f * local.y() / local.z() + intr.cy},
                         local.norm()};
}

std::optional<double> sample_depth(const DepthImage& depth, const Vec2& pixel, int rescue_radius) {
  // Texel (i, j) is centered at (i + 0.5, j + 0.5).
  const double gx = pixel.x() - 0.5;
  const double gy = pixel.y() - 0.5;
  const int i0 = static_cast<int>(std::floor(gx));
  const int j0 = static_cast<int>(std::floor(gy));
  const double fx = gx - i0;
  const double fy = gy - j0;

  auto texel = [&](int i, int j) {
    i = std::clamp(i, 0, depth.width - 1);
    j = std::clamp(j, 0, depth.height - 1);
    return depth.at(i, j);
  };

  const std::array<double, 4> values{texel(i0, j0), texel(i0 + 1, j0), texel(i0, j0 + 1), texel(i0 + 1, j0 + 1)};
  const std::array<double, 4> weights{(1 - fx) * (1 - fy), fx * (1 - fy), (1 - fx) * fy, fx * fy};

  double wsum = 0.0;
  double acc = 0.0;
  int finite = 0;
  double plain = 0.0;
  for (std::size_t k = 0; k < 4; ++k) {
    if (!std::isfinite(values[k])) continue;
    ++finite;
    plain += values[k];
    if (weights[k] > 0.0) {
      wsum += weights[k];
      acc += weights[k] * values[k];
    }
  }
  if (wsum > 0.0) return acc / wsum;
  if (finite > 0) return plain / finite;

  // Rescue ring: nearest finite texel center to the pixel, ties by (row, column).
  const int ci = std::clamp(static_cast<int>(std::floor(pixel.x())), 0, depth.width - 1);
  const int cj = std::clamp(static_cast<int>(std::floor(pixel.y())), 0, depth.height - 1);
  std::optional<double> best;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (int j = std::max(0, cj - rescue_radius); j <= std::min(depth.height - 1, cj + rescue_radius); ++j) {
    for (int i = std::max(0, ci - rescue_radius); i <= std::min(depth.width - 1, ci + rescue_radius); ++i) {
      const double v = depth.at(i, j);
      if (!std::isfinite(v)) continue;
      const double dx = i + 0.5 - pixel.x();
      const double dy = j + 0.5 - pixel.y();
      const double d2 = dx * dx + dy * dy;
      if (d2 < best_d2) {
        best_d2 = d2;
        best = v;
      }
    }
  }
  return best;
}

TableEstimate estimate_table_pose(const CameraModel& camera, const DepthImage& depth, const Detection& det,
                                  double footprint_radius_m) {
  if (!bbox_valid(det.bbox, depth.width, depth.height))
    throw BackprojectionError("detection bbox lies outside the depth image");

  const Vec2 anchor((det.bbox.x_min + det.bbox.x_max) / 2.0, det.bbox.y_max - 0.5);
  const auto range = sample_depth(depth, anchor);
  if (!range) throw BackprojectionError("anchor off-surface");

  Vec3 point = pixel_to_world(camera, anchor, *range);
  if (footprint_radius_m > 0.0) {
    Vec3 ahead = camera.forward();
    ahead.z() = 0.0;
    if (ahead.norm() > 1e-12) point += footprint_radius_m * ahead.normalized();
  }
  return {point, anchor};
}

namespace {

struct WallAxes {
  PlaneFrame frame;
  Vec3 right;  // world direction of increasing pixel u along the wall
  Vec3 up;     // world direction of decreasing pixel v along the wall
  Vec3 normal;
};

WallAxes wall_axes(const Scene& scene, const WallRefs& refs) {
  const Primitive* wall = scene.find(refs.wall_plane);
  if (wall == nullptr || !wall->is_plane())
    throw BackprojectionError("wall plane '" + refs.wall_plane + "' not found in scene");
  WallAxes axes{plane_frame(*wall), {}, {}, {}};
  const auto& cam = scene.camera;
  axes.right = axes.frame.horizontal.dot(cam.right()) >= 0.0 ? axes.frame.horizontal : Vec3(-axes.frame.horizontal);
  axes.up = axes.frame.vertical;
  axes.normal = axes.frame.signed_distance(cam.position()) >= 0.0 ? axes.frame.normal : Vec3(-axes.frame.normal);
  return axes;
}

}  // namespace

Vec3 wardrobe_base_world(const Scene& scene, const WallRefs& refs) {
  const WallAxes axes = wall_axes(scene, refs);
  const Primitive* wardrobe = scene.find_label("wardrobe");
  if (wardrobe == nullptr) throw BackprojectionError("scene has no wardrobe");
  const auto* box = std::get_if<Box>(&wardrobe->shape);
  if (box == nullptr) throw BackprojectionError("wardrobe must be a box");

  const bool corner_left = refs.wall_left_corner_px.x() < refs.wardrobe_base_px.x();
  double h = corner_left ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
  double v = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 8; ++k) {
    const Vec3 local((k & 1 ? 1 : -1) * box->half_extents.x(), (k & 2 ? 1 : -1) * box->half_extents.y(),
                     (k & 4 ? 1 : -1) * box->half_extents.z());
    const Vec3 d = wardrobe->pose.transform_point(local) - axes.frame.origin;
    const double ch = d.dot(axes.right);
    h = corner_left ? std::min(h, ch) : std::max(h, ch);
    v = std::min(v, d.dot(axes.up));
  }
  return axes.frame.origin + h * axes.right + v * axes.up;
}

WallEstimate estimate_wall_pose(const Detection& det, const WallRefs& refs, const Scene& scene) {
  const double span_v = std::abs(refs.wardrobe_top_px.y() - refs.wardrobe_base_px.y());
  const double span_h = std::abs(refs.wardrobe_base_px.x() - refs.wall_left_corner_px.x());
  if (span_v == 0.0 || span_h == 0.0) throw BackprojectionError("degenerate reference");
  const double scale_v = refs.wardrobe_height_m / span_v;
  const double scale_h = refs.wall_segment_m / span_h;

  const WallAxes axes = wall_axes(scene, refs);
  const Vec3 base = wardrobe_base_world(scene, refs);

  const Vec2 anchor((det.bbox.x_min + det.bbox.x_max) / 2.0, (det.bbox.y_min + det.bbox.y_max) / 2.0);
  const Vec2 offset = anchor - refs.wardrobe_base_px;

  WallEstimate est;
  est.center = base + offset.x() * scale_h * axes.right - offset.y() * scale_v * axes.up;
  est.extents_m = Vec2(det.bbox.width() * scale_h, det.bbox.height() * scale_v);
  est.anchor = anchor;
  est.normal = axes.normal;
  return est;
}

}  // namespace goalimagine
