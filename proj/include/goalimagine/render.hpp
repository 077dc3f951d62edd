#pragma once

#include <optional>
#include <vector>

#include "goalimagine/image.hpp"
#include "goalimagine/scene.hpp"

namespace goalimagine {

inline constexpr Rgb kBackgroundColor{210, 210, 210};
inline constexpr double kAmbient = 0.35;
/// Direction the light travels (towards the scene).
inline const Vec3 kLightDirection = Vec3(-1.0, -1.0, -2.0).normalized();

/// Smallest t > 1e-9 with origin + t·dir on the primitive's surface. `dir` must be unit length.
std::optional<double> ray_primitive_intersect(const Vec3& origin, const Vec3& dir, const Primitive& prim);

struct RayHit {
  double t;
  std::size_t object;  // index into scene.objects
  Vec3 normal;         // world frame, facing the ray origin
};

/// Nearest hit among renderable objects. Equal distances resolve to the smaller object id,
/// so the result does not depend on object order.
std::optional<RayHit> cast_ray(const Scene& scene, const Vec3& origin, const Vec3& dir);

struct RenderResult {
  RasterImage raster;
  DepthImage depth;
};

/// One primary ray per pixel center; Lambert shading from a fixed directional light.
/// Throws SceneError when the scene's geometry is invalid.
RenderResult render(const Scene& scene, const CameraModel& camera);

/// Range along the ray through a continuous pixel position, nullopt on a miss.
std::optional<double> pixel_range(const Scene& scene, const CameraModel& camera, const Vec2& pixel);

/// Per-pixel index of the visible renderable object, -1 for background.
struct ObjectIdImage {
  int width = 0;
  int height = 0;
  std::vector<int> ids;
  int at(int x, int y) const { return ids[static_cast<std::size_t>(y) * width + x]; }
};

ObjectIdImage render_object_ids(const Scene& scene, const CameraModel& camera);

}  // namespace goalimagine
