#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "goalimagine/image.hpp"
#include "goalimagine/scene.hpp"

namespace goalimagine {

class PlanningError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kGripperSpeed = 0.25;      // m/s
inline constexpr double kExecutorRateHz = 50.0;
inline constexpr double kGraspTolerance = 1e-6;    // m
inline constexpr double kLiftClearance = 0.05;     // m above the tallest obstacle
inline constexpr double kContactTolerance = 1e-9;  // penetration below this counts as touching

enum class GripperEvent { None, Grasp, Release };

struct Waypoint {
  double t = 0.0;
  Pose gripper;
  GripperEvent event = GripperEvent::None;
};

/// Abstract free-flying gripper path for one pick-and-place.
struct Trajectory {
  std::string object_id;
  Pose goal;
  double speed_mps = kGripperSpeed;
  std::vector<Waypoint> waypoints;

  double duration() const { return waypoints.empty() ? 0.0 : waypoints.back().t; }
  /// Linear position / slerp orientation between waypoints; clamped outside [0, duration].
  Pose gripper_at(double t) const;
};

/// Grasp point in the object frame: top center, or center-back for picture frames.
Vec3 grasp_point_local(const Primitive& object);

/// Lowest z the carried object may travel at: obstacle tops, start and goal
/// bottoms, plus `margin`.
double default_lift_height(const Scene& scene, const std::string& object_id, const Pose& goal,
                           double margin = 0.10);

/// Up-over-down plan: above object at the lift plane, descend and grasp, ascend,
/// straight transit above the goal, descend and release. `lift_height_m` is the
/// height of the carried object's lowest point during transit.
Trajectory plan_pick_and_place(const Scene& scene, const std::string& object_id, const Pose& goal,
                               double lift_height_m);

/// Problems that make a trajectory unusable for `scene`; empty when valid.
std::vector<std::string> trajectory_problems(const Scene& scene, const Trajectory& traj);

/// Signed separation between two primitives: distance when apart, minus the
/// penetration depth when overlapping. Boxes and cylinders must be upright
/// (yaw-only); a plane's solid side is opposite its normal.
double separation(const Primitive& a, const Primitive& b);

struct ExecutionReport {
  Scene final_scene;
  std::vector<std::pair<std::string, RasterImage>> snapshots;
  bool success = false;
  double max_clearance_violation_m = 0.0;
  double min_separation_m = 0.0;
  Pose final_pose;
};

/// Kinematic replay at 50 Hz (plus every waypoint time). Snapshot phases:
/// "a" start, "b" grasp, "c" mid-transit, "d" after release.
ExecutionReport execute(const Scene& scene, const Trajectory& traj, const std::vector<std::string>& snapshot_phases);

}  // namespace goalimagine
