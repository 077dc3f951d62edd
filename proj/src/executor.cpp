#include "goalimagine/executor.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "goalimagine/render.hpp"

namespace goalimagine {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Primitive at_pose(Primitive prim, const Pose& pose) {
  prim.pose = pose;
  return prim;
}

}  // namespace

Pose Trajectory::gripper_at(double t) const {
  if (waypoints.empty()) return {};
  if (t <= waypoints.front().t) return waypoints.front().gripper;
  if (t >= waypoints.back().t) return waypoints.back().gripper;
  const auto next = std::upper_bound(waypoints.begin(), waypoints.end(), t,
                                     [](double v, const Waypoint& w) { return v < w.t; });
  const auto& b = *next;
  const auto& a = *(next - 1);
  const double s = (t - a.t) / (b.t - a.t);
  return Pose(a.gripper.position + s * (b.gripper.position - a.gripper.position),
              a.gripper.orientation.slerp(s, b.gripper.orientation));
}

Vec3 grasp_point_local(const Primitive& object) {
  if (const auto* cyl = std::get_if<Cylinder>(&object.shape)) return {0.0, 0.0, cyl->height / 2.0};
  if (const auto* box = std::get_if<Box>(&object.shape)) {
    if (object.label == "picture_frame") return {0.0, box->half_extents.y(), 0.0};
    return {0.0, 0.0, box->half_extents.z()};
  }
  throw PlanningError("object '" + object.id + "' cannot be grasped");
}

namespace {

double tallest_obstacle(const Scene& scene, const std::string& object_id) {
  double top = -kInf;
  for (const auto& o : scene.objects) {
    if (o.id == object_id || o.is_plane()) continue;
    top = std::max(top, z_range(o).second);
  }
  return top;
}

}  // namespace

double default_lift_height(const Scene& scene, const std::string& object_id, const Pose& goal, double margin) {
  const Primitive* object = scene.find(object_id);
  if (object == nullptr) throw PlanningError("unknown object '" + object_id + "'");
  const double start_bottom = z_range(*object).first;
  const double goal_bottom = z_range(at_pose(*object, goal)).first;
  return std::max({tallest_obstacle(scene, object_id), start_bottom, goal_bottom}) + margin;
}

Trajectory plan_pick_and_place(const Scene& scene, const std::string& object_id, const Pose& goal,
                               double lift_height_m) {
  const Primitive* object = scene.find(object_id);
  if (object == nullptr) throw PlanningError("unknown object '" + object_id + "'");
  if ((goal.position - object->pose.position).norm() < 1e-12 && goal.orientation.angularDistance(object->pose.orientation) < 1e-12)
    throw PlanningError("goal equals the current pose of '" + object_id + "'");

  const double start_bottom = z_range(*object).first;
  const double goal_bottom = z_range(at_pose(*object, goal)).first;
  if (lift_height_m < tallest_obstacle(scene, object_id) + kLiftClearance || lift_height_m <= start_bottom ||
      lift_height_m <= goal_bottom)
    throw PlanningError("insufficient lift");

  const Vec3 grasp_local = grasp_point_local(*object);
  const Pose grasp(object->pose.transform_point(grasp_local), object->pose.orientation);
  // Object pose relative to the gripper stays fixed while carried.
  const Pose offset = grasp.inverse().compose(object->pose);
  const Pose release = goal.compose(offset.inverse());

  const Vec3 up = Vec3::UnitZ();
  const Pose above_start(grasp.position + (lift_height_m - start_bottom) * up, grasp.orientation);
  const Pose above_goal(release.position + (lift_height_m - goal_bottom) * up, release.orientation);

  Trajectory traj;
  traj.object_id = object_id;
  traj.goal = goal;
  traj.speed_mps = kGripperSpeed;

  auto append = [&](const Pose& p, GripperEvent ev) {
    if (traj.waypoints.empty()) {
      traj.waypoints.push_back({0.0, p, ev});
      return;
    }
    const double len = (p.position - traj.waypoints.back().gripper.position).norm();
    if (len == 0.0 && ev == GripperEvent::None) return;
    traj.waypoints.push_back({traj.waypoints.back().t + len / traj.speed_mps, p, ev});
  };
  append(above_start, GripperEvent::None);
  append(grasp, GripperEvent::Grasp);
  append(above_start, GripperEvent::None);
  append(above_goal, GripperEvent::None);
  append(release, GripperEvent::Release);
  return traj;
}

std::vector<std::string> trajectory_problems(const Scene& scene, const Trajectory& traj) {
  std::vector<std::string> problems;
  const Primitive* object = scene.find(traj.object_id);
  if (object == nullptr) return {"unknown object '" + traj.object_id + "'"};
  if (traj.waypoints.empty()) return {"trajectory has no waypoints"};
  if (traj.waypoints.front().t != 0.0) problems.emplace_back("first waypoint must be at t = 0");
  for (std::size_t i = 1; i < traj.waypoints.size(); ++i) {
    if (!(traj.waypoints[i].t > traj.waypoints[i - 1].t)) {
      problems.emplace_back("waypoint times must increase strictly");
      break;
    }
  }
  int grasps = 0, releases = 0;
  std::size_t grasp_at = 0, release_at = 0;
  for (std::size_t i = 0; i < traj.waypoints.size(); ++i) {
    if (traj.waypoints[i].event == GripperEvent::Grasp) ++grasps, grasp_at = i;
    if (traj.waypoints[i].event == GripperEvent::Release) ++releases, release_at = i;
  }
  if (grasps != 1 || releases != 1 || release_at < grasp_at) {
    problems.emplace_back("need exactly one grasp followed by exactly one release");
  } else {
    const Vec3 grasp_world = object->pose.transform_point(grasp_point_local(*object));
    if ((traj.waypoints[grasp_at].gripper.position - grasp_world).norm() > kGraspTolerance)
      problems.emplace_back("grasp waypoint is not at the object's grasp point");
  }
  return problems;
}

// ---------------------------------------------------------------------------
// Separation between upright prisms (circle or rectangle footprint × z interval) and planes.

namespace {

struct Footprint {
  bool circle;
  Vec2 center;
  double radius;     // circle
  Vec2 half;         // rectangle
  Eigen::Matrix2d rot;  // rectangle frame -> world
};

void require_upright(const Primitive& p) {
  const Vec3 z = p.pose.rotate(Vec3::UnitZ());
  if (std::abs(z.z() - 1.0) > 1e-9) throw std::invalid_argument("separation needs yaw-only pose for '" + p.id + "'");
}

Footprint footprint(const Primitive& p) {
  require_upright(p);
  const Eigen::Matrix3d r = p.pose.orientation.toRotationMatrix();
  Footprint f{};
  f.center = p.pose.position.head<2>();
  f.rot = r.topLeftCorner<2, 2>();
  if (const auto* cyl = std::get_if<Cylinder>(&p.shape)) {
    f.circle = true;
    f.radius = cyl->radius;
  } else {
    const auto& box = std::get<Box>(p.shape);
    f.circle = false;
    f.half = box.half_extents.head<2>();
  }
  return f;
}

std::array<Vec2, 4> corners(const Footprint& f) {
  std::array<Vec2, 4> out;
  const std::array<Vec2, 4> local{Vec2(-f.half.x(), -f.half.y()), Vec2(f.half.x(), -f.half.y()),
                                  Vec2(f.half.x(), f.half.y()), Vec2(-f.half.x(), f.half.y())};
  for (std::size_t i = 0; i < 4; ++i) out[i] = f.center + f.rot * local[i];
  return out;
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double s = std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
  return (p - (a + s * ab)).norm();
}

double circle_rect(const Vec2& c, double r, const Footprint& rect) {
  const Vec2 local = rect.rot.transpose() * (c - rect.center);
  const Vec2 q = local.cwiseAbs() - rect.half;
  const double outside = q.cwiseMax(0.0).norm();
  const double inside = std::min(std::max(q.x(), q.y()), 0.0);
  return outside + inside - r;
}

double rect_rect(const Footprint& a, const Footprint& b) {
  const auto ca = corners(a);
  const auto cb = corners(b);
  double max_gap = -kInf;
  for (const Footprint* f : {&a, &b}) {
    for (int k = 0; k < 2; ++k) {
      const Vec2 axis = f->rot.col(k);
      double lo_a = kInf, hi_a = -kInf, lo_b = kInf, hi_b = -kInf;
      for (const auto& v : ca) lo_a = std::min(lo_a, v.dot(axis)), hi_a = std::max(hi_a, v.dot(axis));
      for (const auto& v : cb) lo_b = std::min(lo_b, v.dot(axis)), hi_b = std::max(hi_b, v.dot(axis));
      max_gap = std::max(max_gap, std::max(lo_b - hi_a, lo_a - hi_b));
    }
  }
  if (max_gap <= 0.0) return max_gap;
  double best = kInf;
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      best = std::min(best, point_segment_distance(ca[i], cb[j], cb[(j + 1) % 4]));
      best = std::min(best, point_segment_distance(cb[i], ca[j], ca[(j + 1) % 4]));
    }
  }
  return best;
}

double footprint_distance(const Footprint& a, const Footprint& b) {
  if (a.circle && b.circle) return (a.center - b.center).norm() - a.radius - b.radius;
  if (a.circle) return circle_rect(a.center, a.radius, b);
  if (b.circle) return circle_rect(b.center, b.radius, a);
  return rect_rect(a, b);
}

double plane_separation(const Primitive& plane, const Primitive& p) {
  const PlaneFrame f = plane_frame(plane);
  const Vec3 n = f.normal;
  if (const auto* cyl = std::get_if<Cylinder>(&p.shape)) {
    const Vec3 axis = p.pose.rotate(Vec3::UnitZ());
    const double along = std::abs(n.dot(axis));
    const double radial = std::sqrt(std::max(0.0, 1.0 - along * along));
    return f.signed_distance(p.pose.position) - cyl->radius * radial - cyl->height / 2.0 * along;
  }
  if (const auto* box = std::get_if<Box>(&p.shape)) {
    double lo = kInf;
    for (int k = 0; k < 8; ++k) {
      const Vec3 c((k & 1 ? 1 : -1) * box->half_extents.x(), (k & 2 ? 1 : -1) * box->half_extents.y(),
                   (k & 4 ? 1 : -1) * box->half_extents.z());
      lo = std::min(lo, f.signed_distance(p.pose.transform_point(c)));
    }
    return lo;
  }
  return kInf;
}

}  // namespace

double separation(const Primitive& a, const Primitive& b) {
  if (a.is_plane() && b.is_plane()) return kInf;
  if (a.is_plane()) return plane_separation(a, b);
  if (b.is_plane()) return plane_separation(b, a);

  const double dh = footprint_distance(footprint(a), footprint(b));
  const auto [a_lo, a_hi] = z_range(a);
  const auto [b_lo, b_hi] = z_range(b);
  const double dv = std::max(b_lo - a_hi, a_lo - b_hi);
  if (dh > 0.0 && dv > 0.0) return std::hypot(dh, dv);
  if (dh > 0.0) return dh;
  if (dv > 0.0) return dv;
  return std::max(dh, dv);
}

// ---------------------------------------------------------------------------

ExecutionReport execute(const Scene& scene, const Trajectory& traj, const std::vector<std::string>& snapshot_phases) {
  const auto problems = trajectory_problems(scene, traj);
  if (!problems.empty()) throw std::invalid_argument("invalid trajectory: " + problems.front());

  const Primitive& object = *scene.find(traj.object_id);
  const auto& wps = traj.waypoints;
  std::size_t grasp_i = 0, release_i = 0;
  for (std::size_t i = 0; i < wps.size(); ++i) {
    if (wps[i].event == GripperEvent::Grasp) grasp_i = i;
    if (wps[i].event == GripperEvent::Release) release_i = i;
  }
  const double t_grasp = wps[grasp_i].t;
  const double t_release = wps[release_i].t;
  const Pose offset = wps[grasp_i].gripper.inverse().compose(object.pose);
  const Pose released = wps[release_i].gripper.compose(offset);

  auto object_pose_at = [&](double t) {
    if (t < t_grasp) return object.pose;
    if (t >= t_release) return released;
    return traj.gripper_at(t).compose(offset);
  };

  std::vector<double> ticks;
  const double duration = traj.duration();
  for (int k = 0; k / kExecutorRateHz < duration; ++k) ticks.push_back(k / kExecutorRateHz);
  for (const auto& w : wps) ticks.push_back(w.t);
  std::sort(ticks.begin(), ticks.end());
  ticks.erase(std::unique(ticks.begin(), ticks.end()), ticks.end());

  ExecutionReport report;
  report.min_separation_m = kInf;
  for (double t : ticks) {
    const Primitive carried = at_pose(object, object_pose_at(t));
    for (const auto& other : scene.objects) {
      if (other.id == object.id) continue;
      const double sep = separation(carried, other);
      report.min_separation_m = std::min(report.min_separation_m, sep);
      if (-sep > kContactTolerance) report.max_clearance_violation_m = std::max(report.max_clearance_violation_m, -sep);
    }
  }

  report.final_pose = released;
  report.final_scene = scene;
  report.final_scene.find(object.id)->pose = released;

  const double t_mid = (release_i > grasp_i + 2) ? (wps[grasp_i + 1].t + wps[release_i - 1].t) / 2.0
                                                 : (t_grasp + t_release) / 2.0;
  for (const auto& phase : snapshot_phases) {
    double t;
    if (phase == "a") t = 0.0;
    else if (phase == "b") t = t_grasp;
    else if (phase == "c") t = t_mid;
    else if (phase == "d") t = duration;
    else throw std::invalid_argument("unknown snapshot phase '" + phase + "'");
    Scene snap = scene;
    Primitive* moved = snap.find(object.id);
    moved->pose = object_pose_at(t);
    moved->renderable = true;
    report.snapshots.emplace_back(phase, render(snap, snap.camera).raster);
  }

  const bool at_goal = (released.position - traj.goal.position).norm() <= 1e-9 &&
                       released.orientation.angularDistance(traj.goal.orientation) <= 1e-9;
  report.success = at_goal && report.max_clearance_violation_m == 0.0;
  return report;
}

}  // namespace goalimagine
