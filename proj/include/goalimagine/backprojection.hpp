#pragma once

#include <optional>
#include <stdexcept>

#include "goalimagine/detection_types.hpp"
#include "goalimagine/image.hpp"
#include "goalimagine/scene.hpp"

namespace goalimagine {

class BackprojectionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unit view direction (camera frame) through continuous pixel coordinates.
/// Pixel (i, j) has its center at (i + 0.5, j + 0.5).
Vec3 pixel_ray(const Intrinsics& intr, const Vec2& pixel);

/// World point at Euclidean distance `range_m` along the pixel's ray.
/// Throws BackprojectionError("no surface at pixel") for non-finite or non-positive ranges.
Vec3 pixel_to_world(const CameraModel& camera, const Vec2& pixel, double range_m);

struct PixelProjection {
  Vec2 pixel;
  double range_m;
};

/// Forward projection; nullopt for points at or behind the image plane.
std::optional<PixelProjection> project_to_pixel(const CameraModel& camera, const Vec3& world);

/// Bilinear range lookup over the four texels around `pixel`, ignoring
/// infinite texels. Falls back to the nearest finite texel within a
/// `rescue_radius`-pixel ring; nullopt when there is none.
std::optional<double> sample_depth(const DepthImage& depth, const Vec2& pixel, int rescue_radius = 5);

struct TableEstimate {
  Vec3 point;   // on the supporting surface, world frame
  Vec2 anchor;  // pixel used for the depth lookup
};

/// Bottom-center depth-ray estimate: the anchor ((x_min+x_max)/2, y_max-0.5)
/// is pushed out along its ray by the range at that pixel.
///
/// With `footprint_radius_m` > 0 the contact point is moved that far along the
/// camera's horizontal viewing direction, from the nearest rim of a circular
/// footprint to its center. Zero gives the raw contact point.
TableEstimate estimate_table_pose(const CameraModel& camera, const DepthImage& depth, const Detection& det,
                                  double footprint_radius_m = 0.0);

struct WallEstimate {
  Vec3 center;      // on the wall plane, world frame
  Vec2 extents_m;   // (width, height)
  Vec2 anchor;      // bbox center pixel
  Vec3 normal;      // wall normal, pointing into the room
};

/// World point of the wardrobe's lower corner on the wall nearest the wall's
/// left end: the point the `wardrobe_base_px` reference pixel images.
Vec3 wardrobe_base_world(const Scene& scene, const WallRefs& refs);

/// Similar-triangles wall estimate from the wardrobe references. Assumes the
/// camera views the wall fronto-parallel.
WallEstimate estimate_wall_pose(const Detection& det, const WallRefs& refs, const Scene& scene);

}  // namespace goalimagine
