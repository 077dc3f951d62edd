#pragma once

#include <Eigen/Geometry>

namespace goalimagine {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Quat = Eigen::Quaterniond;

constexpr double kPi = 3.14159265358979323846;

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }

/// Rigid transform: position in the parent frame plus a unit quaternion (w,x,y,z).
struct Pose {
  Vec3 position = Vec3::Zero();
  Quat orientation = Quat::Identity();

  Pose() = default;
  Pose(const Vec3& p, const Quat& q) : position(p), orientation(q.normalized()) {}

  static Pose from_yaw(const Vec3& p, double yaw_rad) {
    return Pose(p, Quat(Eigen::AngleAxisd(yaw_rad, Vec3::UnitZ())));
  }

  Vec3 transform_point(const Vec3& p) const { return orientation * p + position; }
  Vec3 rotate(const Vec3& v) const { return orientation * v; }

  Pose inverse() const {
    const Quat inv = orientation.conjugate();
    return Pose(inv * (-position), inv);
  }

  /// this ∘ other: apply other first, then this.
  Pose compose(const Pose& other) const {
    return Pose(transform_point(other.position), orientation * other.orientation);
  }
};

}  // namespace goalimagine
