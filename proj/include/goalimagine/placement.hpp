#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "goalimagine/detection_types.hpp"
#include "goalimagine/scene.hpp"

namespace goalimagine {

class PlacementError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Largest height difference between a table point and the tabletop.
inline constexpr double kSurfaceTolerance = 0.01;

struct PlacementRules {
  double bowl_radius_m = 0.07;
  double clearance_m = 0.02;
  double edge_margin_m = 0.02;
  double frame_wall_margin_m = 0.05;
};

/// Defaults, with bowl_radius_m taken from the scene's bowl cylinder when present.
PlacementRules rules_for_scene(const Scene& scene);

struct Verdict {
  bool valid = true;
  std::vector<std::string> violations;
  double score = 0.0;
};

/// `point` is where the bowl's footprint center meets the table.
Verdict check_table_placement(const Scene& scene, const Vec3& point, const PlacementRules& rules);

/// `center` lies on the wall; `extents` are (width, height) in meters.
Verdict check_wall_placement(const Scene& scene, const Vec3& center, const Vec2& extents,
                             const PlacementRules& rules);

/// Goal hypothesis derived from one detection.
struct GoalEstimate {
  std::string task_object;
  Vec3 goal_position;  // surface point (table) or wall point (frame)
  std::optional<Vec2> goal_extents_m;
  std::string estimator;  // "depth_ray" | "wall_refs"
  Vec2 anchor_pixel;
  int candidate_index = 0;
  Pose goal_pose;  // object pose that realizes the goal
};

struct ScoredCandidate {
  Detection detection;
  GoalEstimate goal;
  Verdict verdict;
};

/// Wall normal oriented towards the scene camera.
Vec3 room_facing_normal(const Scene& scene, const Primitive& wall);

/// Object pose that realizes a goal point: a cylinder stands on the point (resting
/// on the tabletop when the point is within kSurfaceTolerance of it); a
/// box is hung with its back face (local +y) on the wall and its front facing the room.
Pose goal_pose_for(const Scene& scene, const Primitive& task_object, const Vec3& goal_point);

/// Best valid entry by (confidence, score, lowest candidate_index); nullopt when none is valid.
std::optional<std::size_t> choose_candidate(const std::vector<ScoredCandidate>& scored);

}  // namespace goalimagine
