#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "goalimagine/geometry.hpp"

namespace goalimagine {

class SceneError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Box {
  Vec3 half_extents;
};

/// Upright in the object frame: axis along local z, centered on the pose origin.
struct Cylinder {
  double radius = 0.0;
  double height = 0.0;
};

/// Points x (object frame) with normal·x = offset. Optional in-plane bounds
/// [h_min, h_max, v_min, v_max] turn it into a rectangle; see plane_frame().
struct Plane {
  Vec3 normal = Vec3::UnitZ();
  double offset = 0.0;
  std::optional<std::array<double, 4>> bounds;
};

using Shape = std::variant<Box, Cylinder, Plane>;

using Rgb = std::array<std::uint8_t, 3>;

struct Primitive {
  std::string id;
  std::string label;
  Shape shape;
  Pose pose;
  Rgb color{200, 200, 200};
  bool renderable = true;

  bool is_plane() const { return std::holds_alternative<Plane>(shape); }
};

struct Intrinsics {
  double f = 0.0;
  double cx = 0.0;
  double cy = 0.0;
};

/// Pinhole camera. Camera frame: +x right, +y down, +z forward.
struct CameraModel {
  Pose pose;
  double fov_horizontal_deg = 60.0;
  int width = 512;
  int height = 512;

  Intrinsics intrinsics() const;
  Vec3 position() const { return pose.position; }
  Vec3 forward() const { return pose.rotate(Vec3::UnitZ()); }
  Vec3 right() const { return pose.rotate(Vec3::UnitX()); }
};

/// Builds a camera looking from `position` at `target` with world z as up.
/// Throws SceneError when the view direction is parallel to z.
CameraModel camera_look_at(const Vec3& position, const Vec3& target, double fov_deg,
                           int width, int height);

/// f = (width/2) / tan(fov/2), principal point at the image center.
Intrinsics camera_intrinsics(double fov_deg, int width, int height);

enum class Task { PlaceBowlOnTable, HangFrameOnWall };

std::string_view task_name(Task task);
std::string_view task_object_label(Task task);

/// Wall-anchoring references for the frame task. Pixel coordinates are continuous.
struct WallRefs {
  double wardrobe_height_m = 0.0;
  Vec2 wardrobe_top_px = Vec2::Zero();
  Vec2 wardrobe_base_px = Vec2::Zero();
  Vec2 wall_left_corner_px = Vec2::Zero();
  double wall_segment_m = 0.0;
  std::string wall_plane;
};

struct Scene {
  Task task = Task::PlaceBowlOnTable;
  CameraModel camera;
  std::vector<Primitive> objects;
  std::optional<WallRefs> wall_refs;

  const Primitive* find(std::string_view id) const;
  Primitive* find(std::string_view id);
  /// First object carrying `label`, or nullptr.
  const Primitive* find_label(std::string_view label) const;
  std::size_t count_label(std::string_view label) const;
};

/// Geometry-only rules: ids, dimensions, normals, quaternions, camera.
std::vector<std::string> geometry_violations(const Scene& scene);

/// Every invariant violation, ordered by subject (object id) then rule name.
std::vector<std::string> validate_scene(const Scene& scene);

/// World-frame description of a plane primitive. The vertical axis is world z
/// projected into the plane (world x for horizontal planes); horizontal = vertical × normal.
struct PlaneFrame {
  Vec3 origin;
  Vec3 normal;
  Vec3 horizontal;
  Vec3 vertical;

  Vec3 point(double h, double v) const { return origin + h * horizontal + v * vertical; }
  Vec2 coords(const Vec3& p) const {
    const Vec3 d = p - origin;
    return {d.dot(horizontal), d.dot(vertical)};
  }
  double signed_distance(const Vec3& p) const { return (p - origin).dot(normal); }
};

PlaneFrame plane_frame(const Primitive& plane);

/// World-space z range covered by a bounded primitive (planes return ±infinity
/// unless horizontal).
std::pair<double, double> z_range(const Primitive& prim);

Scene parse_scene(std::string_view json_text);
Scene load_scene(const std::string& path);
std::string scene_to_json(const Scene& scene);

}  // namespace goalimagine
