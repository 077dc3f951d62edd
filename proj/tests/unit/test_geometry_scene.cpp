#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "goalimagine/scene.hpp"
#include "../support/oracles.hpp"

using namespace goalimagine;

namespace {

const std::string kRoot = GOALIMAGINE_SOURCE_DIR;

Scene minimal_table_scene() {
  Scene s;
  s.camera = camera_look_at({0, -1, 1.5}, {0, 1, 0.7}, 60, 64, 48);
  s.objects.push_back({"table", "table", Box{Vec3(0.5, 0.4, 0.35)}, Pose({0, 1, 0.35}, Quat::Identity())});
  return s;
}

bool mentions(const std::vector<std::string>& vs, const std::string& needle) {
  for (const auto& v : vs)
    if (v.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST(Pose, ComposeWithInverseIsIdentity) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 1000; ++i) {
    const Quat q = Quat::UnitRandom();
    const Pose p(Vec3(oracle::uniform(rng, -10, 10), oracle::uniform(rng, -10, 10), oracle::uniform(rng, -10, 10)), q);
    const Vec3 x(oracle::uniform(rng, -10, 10), oracle::uniform(rng, -10, 10), oracle::uniform(rng, -10, 10));
    EXPECT_LT((p.compose(p.inverse()).transform_point(x) - x).norm(), 1e-12);
    EXPECT_LT((p.inverse().compose(p).transform_point(x) - x).norm(), 1e-12);
    EXPECT_NEAR(p.orientation.norm(), 1.0, 1e-9);
  }
}

TEST(Pose, ComposeAppliesRightOperandFirst) {
  const Pose a = Pose::from_yaw({1, 0, 0}, kPi / 2);
  const Pose b({0, 2, 0}, Quat::Identity());
  // b moves (0,0,0) to (0,2,0); a rotates that to (-2,0,0) and shifts by (1,0,0).
  EXPECT_LT((a.compose(b).transform_point(Vec3::Zero()) - Vec3(-1, 0, 0)).norm(), 1e-12);
}

TEST(Camera, IntrinsicsExamples) {
  const Intrinsics a = camera_intrinsics(90, 512, 512);
  EXPECT_NEAR(a.f, 256.0, 1e-9);
  EXPECT_DOUBLE_EQ(a.cx, 256.0);
  EXPECT_DOUBLE_EQ(a.cy, 256.0);
  EXPECT_NEAR(camera_intrinsics(60, 640, 480).f, 554.2563, 1e-4);
  EXPECT_NEAR(camera_intrinsics(179.9, 512, 512).f, 0.2234, 1e-4);
  EXPECT_DOUBLE_EQ(camera_intrinsics(60, 640, 480).cy, 240.0);
}

TEST(Camera, IntrinsicsRejectFovOutsideOpenInterval) {
  EXPECT_THROW(camera_intrinsics(0, 64, 64), SceneError);
  EXPECT_THROW(camera_intrinsics(180, 64, 64), SceneError);
  EXPECT_THROW(camera_intrinsics(-5, 64, 64), SceneError);
}

TEST(Camera, FocalLengthDecreasesWithFov) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 1000; ++i) {
    double a = oracle::uniform(rng, 0.5, 179.5), b = oracle::uniform(rng, 0.5, 179.5);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    const int w = 16 + static_cast<int>(rng() % 2000);
    EXPECT_GT(camera_intrinsics(a, w, 100).f, camera_intrinsics(b, w, 100).f);
  }
}

TEST(Camera, LookAtBuildsRightDownForwardFrame) {
  const CameraModel cam = camera_look_at({0, 0, 1}, {0, 5, 1}, 60, 64, 64);
  EXPECT_LT((cam.forward() - Vec3(0, 1, 0)).norm(), 1e-12);
  EXPECT_LT((cam.right() - Vec3(1, 0, 0)).norm(), 1e-12);
  EXPECT_LT((cam.pose.rotate(Vec3::UnitY()) - Vec3(0, 0, -1)).norm(), 1e-12);
}

TEST(Camera, LookAtRejectsVerticalView) {
  EXPECT_THROW(camera_look_at({0, 0, 2}, {0, 0, 0}, 60, 64, 64), SceneError);
}

TEST(ValidateScene, BundledScenesAreValid) {
  for (const char* name : {"table.json", "wall.json", "table_saturated.json"}) {
    const Scene s = load_scene(kRoot + "/scenes/" + name);
    EXPECT_TRUE(validate_scene(s).empty()) << name << ": " << validate_scene(s).front();
  }
}

TEST(ValidateScene, BundledTableSceneContents) {
  const Scene s = load_scene(kRoot + "/scenes/table.json");
  EXPECT_EQ(s.task, Task::PlaceBowlOnTable);
  EXPECT_EQ(s.count_label("table"), 1u);
  EXPECT_EQ(s.count_label("glass"), 3u);
  EXPECT_FALSE(s.find("bowl")->renderable);
}

TEST(ValidateScene, DuplicateIdNamedOnce) {
  Scene s = minimal_table_scene();
  s.objects.push_back({"glass1", "glass", Cylinder{0.03, 0.1}, Pose({0, 1, 0.75}, Quat::Identity())});
  s.objects.push_back({"glass1", "glass", Cylinder{0.03, 0.1}, Pose({0.2, 1, 0.75}, Quat::Identity())});
  const auto vs = validate_scene(s);
  ASSERT_EQ(vs.size(), 1u);
  EXPECT_NE(vs[0].find("glass1"), std::string::npos);
  EXPECT_NE(vs[0].find("unique_id"), std::string::npos);
}

TEST(ValidateScene, FrameSceneWithoutWallRefs) {
  Scene s = load_scene(kRoot + "/scenes/wall.json");
  s.wall_refs.reset();
  const auto vs = validate_scene(s);
  ASSERT_EQ(vs.size(), 1u);
  EXPECT_EQ(vs[0].rfind("wall_refs", 0), 0u);
}

TEST(ValidateScene, ReportsEveryRule) {
  Scene s = minimal_table_scene();
  s.objects.push_back({"b", "glass", Cylinder{-0.03, 0.1}, Pose()});
  s.objects.push_back({"a", "box", Box{Vec3(0.1, 0.0, 0.1)}, Pose()});
  s.objects.push_back({"p", "floor", Plane{Vec3(0, 0, 2), 0.0, std::nullopt}, Pose()});
  s.objects.push_back({"q", "floor", Plane{Vec3(0, 0, 1), 0.0, std::array<double, 4>{1, 0, 0, 1}}, Pose()});
  s.camera.width = 8;
  s.camera.fov_horizontal_deg = 200;
  const auto vs = validate_scene(s);
  EXPECT_TRUE(mentions(vs, "b: positive_dimensions"));
  EXPECT_TRUE(mentions(vs, "a: positive_dimensions"));
  EXPECT_TRUE(mentions(vs, "p: unit_normal"));
  EXPECT_TRUE(mentions(vs, "q: plane_bounds"));
  EXPECT_TRUE(mentions(vs, "camera: fov_range"));
  EXPECT_TRUE(mentions(vs, "camera: min_resolution"));
  EXPECT_TRUE(std::is_sorted(vs.begin(), vs.end()));
}

TEST(ValidateScene, TableCountAndWallRefs) {
  Scene s = minimal_table_scene();
  s.objects.clear();
  EXPECT_TRUE(mentions(validate_scene(s), "table: label_count"));

  Scene w = load_scene(kRoot + "/scenes/wall.json");
  w.wall_refs->wardrobe_top_px = Vec2(-3, 10);
  w.wall_refs->wall_plane = "wardrobe";
  w.wall_refs->wardrobe_height_m = 0;
  const auto vs = validate_scene(w);
  EXPECT_TRUE(mentions(vs, "pixel_in_bounds"));
  EXPECT_TRUE(mentions(vs, "wall_plane"));
  EXPECT_TRUE(mentions(vs, "wardrobe_height_positive"));
}

TEST(SceneJson, RoundTripPreservesGeometry) {
  const Scene a = load_scene(kRoot + "/scenes/wall.json");
  const Scene b = parse_scene(scene_to_json(a));
  ASSERT_EQ(a.objects.size(), b.objects.size());
  for (std::size_t i = 0; i < a.objects.size(); ++i) {
    EXPECT_EQ(a.objects[i].id, b.objects[i].id);
    EXPECT_EQ(a.objects[i].color, b.objects[i].color);
    EXPECT_EQ(a.objects[i].renderable, b.objects[i].renderable);
    EXPECT_LT((a.objects[i].pose.position - b.objects[i].pose.position).norm(), 1e-12);
    EXPECT_LT(a.objects[i].pose.orientation.angularDistance(b.objects[i].pose.orientation), 1e-9);
  }
  EXPECT_LT((a.camera.forward() - b.camera.forward()).norm(), 1e-12);
  ASSERT_TRUE(b.wall_refs);
  EXPECT_EQ(a.wall_refs->wardrobe_top_px, b.wall_refs->wardrobe_top_px);
}

TEST(SceneJson, YawDegreesBecomeZRotation) {
  const Scene s = parse_scene(R"({"task":"place_bowl_on_table",
    "camera":{"position":[0,-1,1],"look_at":[0,1,0],"fov_deg":60,"width":32,"height":32},
    "objects":[{"id":"t","label":"table","shape":{"type":"box","half_extents":[1,0.5,0.4]},"position":[0,0,0.4],"yaw_deg":90}]})");
  EXPECT_LT((s.objects[0].pose.rotate(Vec3::UnitX()) - Vec3::UnitY()).norm(), 1e-12);
}

TEST(SceneJson, SchemaErrors) {
  EXPECT_THROW(parse_scene("{"), SceneError);
  EXPECT_THROW(parse_scene(R"({"task":"juggle"})"), SceneError);
  EXPECT_THROW(parse_scene(R"({"task":"place_bowl_on_table","camera":{}})"), SceneError);
  EXPECT_THROW(load_scene("/nonexistent/scene.json"), SceneError);
}

TEST(PlaneFrame, WallAxes) {
  const Scene s = load_scene(kRoot + "/scenes/wall.json");
  const PlaneFrame f = plane_frame(*s.find("wall"));
  EXPECT_LT((f.vertical - Vec3::UnitZ()).norm(), 1e-12);
  EXPECT_LT((f.horizontal - Vec3::UnitX()).norm(), 1e-12);
  EXPECT_NEAR(f.signed_distance(Vec3(0.3, 3.0, 1.0)), 0.0, 1e-12);
  EXPECT_LT((f.point(0.5, 1.2) - Vec3(0.5, 3.0, 1.2)).norm(), 1e-12);
}

TEST(ZRange, Shapes) {
  const Primitive box{"b", "b", Box{Vec3(1, 2, 0.5)}, Pose::from_yaw({0, 0, 1}, 0.7)};
  EXPECT_NEAR(z_range(box).first, 0.5, 1e-12);
  EXPECT_NEAR(z_range(box).second, 1.5, 1e-12);
  const Primitive cyl{"c", "c", Cylinder{0.1, 0.4}, Pose({0, 0, 0.2}, Quat::Identity())};
  EXPECT_NEAR(z_range(cyl).first, 0.0, 1e-12);
  EXPECT_NEAR(z_range(cyl).second, 0.4, 1e-12);
  const Primitive floor{"f", "f", Plane{Vec3::UnitZ(), 0.25, std::nullopt}, Pose()};
  EXPECT_NEAR(z_range(floor).second, 0.25, 1e-12);
}
