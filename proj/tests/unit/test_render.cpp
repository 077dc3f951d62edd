#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "goalimagine/backprojection.hpp"
#include "goalimagine/render.hpp"
#include "../support/oracles.hpp"

using namespace goalimagine;

namespace {

const std::string kRoot = GOALIMAGINE_SOURCE_DIR;

// Solid membership, used by the ray-march oracle.
bool inside(const Primitive& p, const Vec3& w) {
  const Vec3 l = p.pose.inverse().transform_point(w);
  if (const auto* b = std::get_if<Box>(&p.shape)) return (l.cwiseAbs() - b->half_extents).maxCoeff() <= 0.0;
  if (const auto* c = std::get_if<Cylinder>(&p.shape))
    return std::hypot(l.x(), l.y()) <= c->radius && std::abs(l.z()) <= c->height / 2.0;
  const auto& pl = std::get<Plane>(p.shape);
  return pl.normal.dot(l) <= pl.offset;
}

// Distance from a world point to the primitive's surface.
double surface_distance(const Primitive& p, const Vec3& w) {
  const Vec3 l = p.pose.inverse().transform_point(w);
  if (const auto* b = std::get_if<Box>(&p.shape)) {
    const Vec3 q = l.cwiseAbs() - b->half_extents;
    return std::abs(q.cwiseMax(0.0).norm() + std::min(q.maxCoeff(), 0.0));
  }
  if (const auto* c = std::get_if<Cylinder>(&p.shape)) {
    const Vec2 q(std::hypot(l.x(), l.y()) - c->radius, std::abs(l.z()) - c->height / 2.0);
    return std::abs(q.cwiseMax(0.0).norm() + std::min(q.maxCoeff(), 0.0));
  }
  const auto& pl = std::get<Plane>(p.shape);
  return std::abs(pl.normal.dot(l) - pl.offset);
}

std::optional<double> ray_march(const Scene& s, const Vec3& o, const Vec3& d, double t_max, double step) {
  auto hit = [&](double t) {
    for (const auto& p : s.objects)
      if (p.renderable && inside(p, o + t * d)) return true;
    return false;
  };
  double prev = 0.0;
  for (double t = step; t <= t_max; t += step) {
    if (hit(t)) {
      double lo = prev, hi = t;
      for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (hit(mid) ? hi : lo) = mid;
      }
      return hi;
    }
    prev = t;
  }
  return std::nullopt;
}

Scene facing_plane_scene(int size) {
  Scene s;
  s.camera = camera_look_at({0, 0, 1}, {0, 1, 1}, 90, size, size);
  s.objects.push_back({"wall", "wall", Plane{Vec3(0, -1, 0), -2.0, std::nullopt}, Pose(), {200, 100, 50}, true});
  return s;
}

}  // namespace

TEST(RayIntersect, AxisAlignedBox) {
  const Primitive box{"b", "b", Box{Vec3(0.5, 0.5, 0.5)}, Pose({0, 0, 5}, Quat::Identity())};
  EXPECT_NEAR(*ray_primitive_intersect(Vec3::Zero(), Vec3::UnitZ(), box), 4.5, 1e-12);
  EXPECT_FALSE(ray_primitive_intersect(Vec3::Zero(), -Vec3::UnitZ(), box));
  EXPECT_NEAR(*ray_primitive_intersect(Vec3(0, 0, 5), Vec3::UnitZ(), box), 0.5, 1e-12);  // from inside
}

TEST(RayIntersect, Plane) {
  const Primitive plane{"p", "p", Plane{Vec3(0, 0, -1), -10.0, std::nullopt}, Pose()};
  EXPECT_NEAR(*ray_primitive_intersect(Vec3::Zero(), Vec3::UnitZ(), plane), 10.0, 1e-12);
  EXPECT_FALSE(ray_primitive_intersect(Vec3::Zero(), Vec3::UnitX(), plane));
}

TEST(RayIntersect, BoundedPlaneMissesOutsideBounds) {
  const Primitive wall{"w", "w", Plane{Vec3(0, -1, 0), -3.0, std::array<double, 4>{-1, 1, 0, 2}}, Pose()};
  EXPECT_TRUE(ray_primitive_intersect(Vec3(0, 0, 1), Vec3::UnitY(), wall));
  EXPECT_FALSE(ray_primitive_intersect(Vec3(1.5, 0, 1), Vec3::UnitY(), wall));
  EXPECT_FALSE(ray_primitive_intersect(Vec3(0, 0, 2.5), Vec3::UnitY(), wall));
}

TEST(RayIntersect, CylinderMatchesRayMarch) {
  const Primitive cyl{"c", "c", Cylinder{1.0, 2.0}, Pose({3, 0, 3}, Quat::Identity())};
  const Vec3 dir = Vec3(1, 0, 1).normalized();
  Scene s;
  s.objects.push_back(cyl);
  const auto march = ray_march(s, Vec3::Zero(), dir, 10.0, 1e-5);  // 10^6 steps
  ASSERT_TRUE(march);
  const auto t = ray_primitive_intersect(Vec3::Zero(), dir, cyl);
  ASSERT_TRUE(t);
  EXPECT_NEAR(*t, *march, 1e-4);
}

TEST(RayIntersect, RandomCylindersAgreeWithRayMarch) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 50; ++i) {
    const Primitive cyl{"c", "c", Cylinder{oracle::uniform(rng, 0.2, 1), oracle::uniform(rng, 0.2, 2)},
                        Pose::from_yaw(Vec3(oracle::uniform(rng, 2, 4), oracle::uniform(rng, -1, 1), oracle::uniform(rng, -1, 1)), 0.3)};
    const Vec3 target = cyl.pose.position + Vec3(oracle::uniform(rng, -0.5, 0.5), oracle::uniform(rng, -0.5, 0.5), oracle::uniform(rng, -0.5, 0.5));
    const Vec3 dir = target.normalized();
    Scene s;
    s.objects.push_back(cyl);
    const auto march = ray_march(s, Vec3::Zero(), dir, 8.0, 1e-4);
    const auto t = ray_primitive_intersect(Vec3::Zero(), dir, cyl);
    ASSERT_EQ(march.has_value(), t.has_value());
    if (t) EXPECT_NEAR(*t, *march, 2e-4);
  }
}

TEST(Render, EmptySceneIsBackground) {
  Scene s;
  s.camera = camera_look_at({0, 0, 1}, {0, 1, 1}, 60, 32, 24);
  const RenderResult r = render(s, s.camera);
  EXPECT_EQ(r.raster, RasterImage(32, 24, kBackgroundColor));
  EXPECT_TRUE(std::all_of(r.depth.depth.begin(), r.depth.depth.end(), [](double d) { return std::isinf(d); }));
}

TEST(Render, FacingPlaneCenterRange) {
  // Odd width puts a pixel center exactly on the optical axis.
  const Scene s = facing_plane_scene(513);
  const RenderResult r = render(s, s.camera);
  EXPECT_NEAR(r.depth.at(256, 256), 2.0, 1e-9);
}

TEST(Render, FacingPlaneCornerRangeIsEuclidean) {
  const Scene s = facing_plane_scene(512);
  EXPECT_NEAR(*pixel_range(s, s.camera, Vec2(0, 0)), 2.0 * std::sqrt(3.0), 1e-6);
  EXPECT_NEAR(*pixel_range(s, s.camera, Vec2(512, 512)), 2.0 * std::sqrt(3.0), 1e-6);
  // The corner pixel's center sits half a pixel inwards.
  const RenderResult r = render(s, s.camera);
  const double u = (0.5 - 256.0) / 256.0;
  EXPECT_NEAR(r.depth.at(0, 0), 2.0 * std::sqrt(u * u + u * u + 1.0), 1e-9);
}

TEST(Render, DeterministicAndPermutationInvariant) {
  const Scene s = load_scene(kRoot + "/scenes/table.json");
  const RenderResult a = render(s, s.camera);
  EXPECT_EQ(render(s, s.camera).raster, a.raster);

  std::mt19937_64 rng(4);
  for (int i = 0; i < 3; ++i) {
    Scene shuffled = s;
    std::shuffle(shuffled.objects.begin(), shuffled.objects.end(), rng);
    const RenderResult b = render(shuffled, shuffled.camera);
    EXPECT_EQ(b.raster, a.raster);
    EXPECT_EQ(b.depth.depth, a.depth.depth);
  }
}

TEST(Render, CoincidentSurfacesResolveByIdNotOrder) {
  Scene s = facing_plane_scene(32);
  s.objects.push_back({"a_wall", "wall", Plane{Vec3(0, -1, 0), -2.0, std::nullopt}, Pose(), {10, 10, 10}, true});
  const RasterImage first = render(s, s.camera).raster;
  std::reverse(s.objects.begin(), s.objects.end());
  EXPECT_EQ(render(s, s.camera).raster, first);
}

TEST(Render, GlassesOccludeTable) {
  const Scene s = load_scene(kRoot + "/scenes/table.json");
  const RenderResult r = render(s, s.camera);
  const ObjectIdImage ids = render_object_ids(s, s.camera);
  const Primitive& table = *s.find("table");
  const double top = z_range(table).second;
  int checked = 0;
  for (int y = 0; y < 512 && checked < 100; y += 3) {
    for (int x = 0; x < 512 && checked < 100; x += 3) {
      const int id = ids.at(x, y);
      if (id < 0 || s.objects[id].label != "glass") continue;
      const Vec3 dir = s.camera.pose.rotate(pixel_ray(s.camera.intrinsics(), Vec2(x + 0.5, y + 0.5)));
      if (dir.z() >= 0.0) continue;
      const double t_top = (top - s.camera.position().z()) / dir.z();
      EXPECT_LT(r.depth.at(x, y), t_top);
      ++checked;
    }
  }
  EXPECT_GT(checked, 20);
}

TEST(Render, DepthMatchesRayMarchOnSampledPixels) {
  const Scene s = load_scene(kRoot + "/scenes/table.json");
  const RenderResult r = render(s, s.camera);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    const int x = static_cast<int>(rng() % 512), y = static_cast<int>(rng() % 512);
    const Vec3 dir = s.camera.pose.rotate(pixel_ray(s.camera.intrinsics(), Vec2(x + 0.5, y + 0.5)));
    if (std::isfinite(r.depth.at(x, y)) && r.depth.at(x, y) > 150.0) continue;  // grazing floor hits
    const auto march = ray_march(s, s.camera.position(), dir, 160.0, 2e-3);
    ASSERT_EQ(march.has_value(), std::isfinite(r.depth.at(x, y))) << x << "," << y;
    if (march) EXPECT_NEAR(r.depth.at(x, y), *march, 1e-6) << x << "," << y;
  }
}

TEST(Render, FiniteDepthLiesOnASurface) {
  for (const char* name : {"table.json", "wall.json"}) {
    const Scene s = load_scene(kRoot + "/scenes/" + name);
    const RenderResult r = render(s, s.camera);
    for (int y = 0; y < 512; y += 7) {
      for (int x = 0; x < 512; x += 7) {
        const double d = r.depth.at(x, y);
        if (!std::isfinite(d)) continue;
        EXPECT_GT(d, 0.0);
        const Vec3 p = pixel_to_world(s.camera, Vec2(x + 0.5, y + 0.5), d);
        double best = INFINITY;
        for (const auto& o : s.objects)
          if (o.renderable) best = std::min(best, surface_distance(o, p));
        EXPECT_LT(best, 1e-6) << name << " " << x << "," << y;
      }
    }
  }
}

TEST(Render, NonRenderableObjectDisappears) {
  const Scene s = load_scene(kRoot + "/scenes/table.json");
  const RenderResult before = render(s, s.camera);
  for (const char* id : {"glass_1", "glass_2", "table"}) {
    Scene hidden = s;
    hidden.find(id)->renderable = false;
    const RenderResult after = render(hidden, hidden.camera);
    const ObjectIdImage ids = render_object_ids(hidden, hidden.camera);
    const auto index = static_cast<int>(hidden.find(id) - hidden.objects.data());
    for (int i = 0; i < 512 * 512; ++i) {
      ASSERT_NE(ids.ids[i], index);
      ASSERT_GE(after.depth.depth[i], before.depth.depth[i]);
    }
  }
}

TEST(Render, LambertShadingOfFacingPlane) {
  const Scene s = facing_plane_scene(16);
  const RasterImage img = render(s, s.camera).raster;
  // Normal towards the camera is (0,-1,0); light travels along normalize(-1,-1,-2).
  const double lambert = std::max(0.0, -Vec3(0, -1, 0).dot(kLightDirection));
  const double shade = kAmbient + (1.0 - kAmbient) * lambert;
  EXPECT_NEAR(img.at(3, 3)[0], 200 * shade, 1.0);
  EXPECT_NEAR(img.at(3, 3)[1], 100 * shade, 1.0);
}

TEST(Render, RejectsInvalidGeometry) {
  Scene s = facing_plane_scene(16);
  s.objects.push_back({"bad", "glass", Cylinder{-1, 1}, Pose()});
  EXPECT_THROW(render(s, s.camera), SceneError);
}
