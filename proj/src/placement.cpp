#include "goalimagine/placement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace goalimagine {

PlacementRules rules_for_scene(const Scene& scene) {
  PlacementRules rules;
  if (const auto* bowl = scene.find_label("bowl")) {
    if (const auto* cyl = std::get_if<Cylinder>(&bowl->shape)) rules.bowl_radius_m = cyl->radius;
  }
  return rules;
}

namespace {

const Primitive& require_label(const Scene& scene, const char* label) {
  const auto* p = scene.find_label(label);
  if (p == nullptr) throw PlacementError(std::string("scene has no ") + label);
  return *p;
}

const Box& require_box(const Primitive& prim) {
  const auto* box = std::get_if<Box>(&prim.shape);
  if (box == nullptr) throw PlacementError("'" + prim.id + "' must be a box");
  return *box;
}

Verdict finish(std::vector<std::string> violations, double score) {
  Verdict v;
  v.valid = violations.empty();
  v.violations = std::move(violations);
  v.score = score;
  return v;
}

}  // namespace

Verdict check_table_placement(const Scene& scene, const Vec3& point, const PlacementRules& rules) {
  const Primitive& table = require_label(scene, "table");
  const Box& top = require_box(table);
  std::vector<std::string> violations;

  const Vec3 local = table.pose.inverse().transform_point(point);
  const double inset = rules.bowl_radius_m + rules.edge_margin_m;
  const double ex = top.half_extents.x() - inset;
  const double ey = top.half_extents.y() - inset;
  if (std::abs(local.x()) > ex || std::abs(local.y()) > ey) violations.emplace_back("table edge");
  const double edge_slack = std::max(0.0, std::min(ex - std::abs(local.x()), ey - std::abs(local.y())));

  std::vector<const Primitive*> glasses;
  for (const auto& o : scene.objects)
    if (o.label == "glass") glasses.push_back(&o);
  std::sort(glasses.begin(), glasses.end(), [](const Primitive* a, const Primitive* b) { return a->id < b->id; });

  double glass_slack = std::numeric_limits<double>::infinity();
  for (const auto* g : glasses) {
    const auto* cyl = std::get_if<Cylinder>(&g->shape);
    if (cyl == nullptr) throw PlacementError("glass '" + g->id + "' must be a cylinder");
    const double dist = (point.head<2>() - g->pose.position.head<2>()).norm();
    const double required = rules.bowl_radius_m + cyl->radius + rules.clearance_m;
    if (dist < required) violations.push_back("glass clearance: " + g->id);
    glass_slack = std::min(glass_slack, dist - required);
  }
  glass_slack = glasses.empty() ? 0.0 : std::max(0.0, glass_slack);

  const double top_z = z_range(table).second;
  if (std::abs(point.z() - top_z) > kSurfaceTolerance) violations.emplace_back("off table surface");

  return finish(std::move(violations), glass_slack + edge_slack);
}

Verdict check_wall_placement(const Scene& scene, const Vec3& center, const Vec2& extents,
                             const PlacementRules& rules) {
  const Primitive& wall = require_label(scene, "wall");
  if (!wall.is_plane()) throw PlacementError("wall '" + wall.id + "' must be a plane");
  const Primitive& wardrobe = require_label(scene, "wardrobe");
  const Box& body = require_box(wardrobe);
  const PlaneFrame frame = plane_frame(wall);
  std::vector<std::string> violations;

  const Vec2 c = frame.coords(center);
  const double h0 = c.x() - extents.x() / 2.0;
  const double h1 = c.x() + extents.x() / 2.0;
  const double v0 = c.y() - extents.y() / 2.0;
  const double v1 = c.y() + extents.y() / 2.0;

  double bound_slack = std::numeric_limits<double>::infinity();
  if (const auto& bounds = std::get<Plane>(wall.shape).bounds) {
    const double m = rules.frame_wall_margin_m;
    const auto& b = *bounds;
    if (h0 < b[0] + m || h1 > b[1] - m || v0 < b[2] + m || v1 > b[3] - m) violations.emplace_back("wall bounds");
    bound_slack = std::min({h0 - b[0] - m, b[1] - m - h1, v0 - b[2] - m, b[3] - m - v1});
  }

  // Wardrobe footprint: bounding rectangle of its corners in wall coordinates.
  double fh0 = std::numeric_limits<double>::infinity();
  double fh1 = -fh0;
  double fv0 = fh0;
  double fv1 = -fh0;
  for (int k = 0; k < 8; ++k) {
    const Vec3 corner((k & 1 ? 1 : -1) * body.half_extents.x(), (k & 2 ? 1 : -1) * body.half_extents.y(),
                      (k & 4 ? 1 : -1) * body.half_extents.z());
    const Vec2 fc = frame.coords(wardrobe.pose.transform_point(corner));
    fh0 = std::min(fh0, fc.x());
    fh1 = std::max(fh1, fc.x());
    fv0 = std::min(fv0, fc.y());
    fv1 = std::max(fv1, fc.y());
  }
  if (h0 < fh1 && h1 > fh0 && v0 < fv1 && v1 > fv0) violations.emplace_back("wardrobe overlap");
  const double wardrobe_gap = std::max({fh0 - h1, h0 - fh1, fv0 - v1, v0 - fv1});

  const double score = std::max(0.0, std::isfinite(bound_slack) ? bound_slack : 0.0) + std::max(0.0, wardrobe_gap);
  return finish(std::move(violations), score);
}

Vec3 room_facing_normal(const Scene& scene, const Primitive& wall) {
  const PlaneFrame frame = plane_frame(wall);
  return frame.signed_distance(scene.camera.position()) >= 0.0 ? frame.normal : Vec3(-frame.normal);
}

Pose goal_pose_for(const Scene& scene, const Primitive& task_object, const Vec3& goal_point) {
  if (const auto* cyl = std::get_if<Cylinder>(&task_object.shape)) {
    Vec3 base = goal_point;
    if (const auto* table = scene.find_label("table")) {
      const double top_z = z_range(*table).second;
      if (std::abs(base.z() - top_z) <= kSurfaceTolerance) base.z() = top_z;
    }
    return Pose(base + Vec3(0.0, 0.0, cyl->height / 2.0), task_object.pose.orientation);
  }
  if (const auto* box = std::get_if<Box>(&task_object.shape)) {
    const Primitive& wall = require_label(scene, "wall");
    const Vec3 n = room_facing_normal(scene, wall);
    return Pose::from_yaw(goal_point + box->half_extents.y() * n, std::atan2(n.x(), -n.y()));
  }
  throw PlacementError("task object '" + task_object.id + "' must be a cylinder or a box");
}

std::optional<std::size_t> choose_candidate(const std::vector<ScoredCandidate>& scored) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < scored.size(); ++i) {
    const auto& c = scored[i];
    if (!c.verdict.valid) continue;
    if (!best) {
      best = i;
      continue;
    }
    const auto& b = scored[*best];
    const bool better =
        c.detection.confidence > b.detection.confidence ||
        (c.detection.confidence == b.detection.confidence &&
         (c.verdict.score > b.verdict.score ||
          (c.verdict.score == b.verdict.score && c.goal.candidate_index < b.goal.candidate_index)));
    if (better) best = i;
  }
  return best;
}

}  // namespace goalimagine
