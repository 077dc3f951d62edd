#include "goalimagine/render.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "goalimagine/backprojection.hpp"

namespace goalimagine {

namespace {

constexpr double kMinT = 1e-9;

struct LocalHit {
  double t;
  Vec3 normal;  // object frame, outward (planes: as stored)
};

std::optional<LocalHit> hit_box(const Vec3& o, const Vec3& d, const Box& box) {
  double t_near = -std::numeric_limits<double>::infinity();
  double t_far = std::numeric_limits<double>::infinity();
  int near_axis = -1;
  int far_axis = -1;
  for (int a = 0; a < 3; ++a) {
    const double h = box.half_extents[a];
    if (std::abs(d[a]) < 1e-300) {
      if (o[a] < -h || o[a] > h) return std::nullopt;
      continue;
    }
    double t1 = (-h - o[a]) / d[a];
    double t2 = (h - o[a]) / d[a];
    if (t1 > t2) std::swap(t1, t2);
    if (t1 > t_near) {
      t_near = t1;
      near_axis = a;
    }
    if (t2 < t_far) {
      t_far = t2;
      far_axis = a;
    }
  }
  if (t_near > t_far) return std::nullopt;
  double t;
  int axis;
  if (t_near > kMinT) {
    t = t_near;
    axis = near_axis;
  } else if (t_far > kMinT) {
    t = t_far;
    axis = far_axis;
  } else {
    return std::nullopt;
  }
  Vec3 n = Vec3::Zero();
  if (axis >= 0) n[axis] = (o[axis] + t * d[axis]) >= 0.0 ? 1.0 : -1.0;
  return LocalHit{t, n};
}

std::optional<LocalHit> hit_cylinder(const Vec3& o, const Vec3& d, const Cylinder& cyl) {
  const double half = cyl.height / 2.0;
  std::optional<LocalHit> best;
  auto consider = [&](double t, const Vec3& n) {
    if (t > kMinT && (!best || t < best->t)) best = LocalHit{t, n};
  };

  const double a = d.x() * d.x() + d.y() * d.y();
  if (a > 0.0) {
    const double b = 2.0 * (o.x() * d.x() + o.y() * d.y());
    const double c = o.x() * o.x() + o.y() * o.y() - cyl.radius * cyl.radius;
    const double disc = b * b - 4.0 * a * c;
    if (disc >= 0.0) {
      const double sq = std::sqrt(disc);
      // Numerically stable pair of roots.
      const double q = -0.5 * (b + std::copysign(sq, b));
      double roots[2] = {q / a, q != 0.0 ? c / q : q / a};
      for (double t : roots) {
        const Vec3 p = o + t * d;
        if (std::abs(p.z()) <= half) consider(t, Vec3(p.x(), p.y(), 0.0) / cyl.radius);
      }
    }
  }
  if (std::abs(d.z()) > 0.0) {
    for (double zc : {-half, half}) {
      const double t = (zc - o.z()) / d.z();
      const Vec3 p = o + t * d;
      if (p.x() * p.x() + p.y() * p.y() <= cyl.radius * cyl.radius) consider(t, Vec3(0.0, 0.0, zc > 0 ? 1.0 : -1.0));
    }
  }
  return best;
}

std::optional<LocalHit> hit_plane(const Vec3& o, const Vec3& d, const Plane& plane) {
  const double denom = plane.normal.dot(d);
  if (std::abs(denom) < 1e-15) return std::nullopt;
  const double t = (plane.offset - plane.normal.dot(o)) / denom;
  if (!(t > kMinT)) return std::nullopt;
  return LocalHit{t, plane.normal};
}

// Primitive with the per-object terms the inner loop needs precomputed.
struct Prepared {
  const Primitive* prim;
  Pose to_local;
  std::optional<PlaneFrame> frame;
};

Prepared prepare(const Primitive& prim) {
  Prepared p{&prim, prim.pose.inverse(), std::nullopt};
  if (prim.is_plane()) p.frame = plane_frame(prim);
  return p;
}

std::optional<LocalHit> intersect(const Prepared& pp, const Vec3& origin, const Vec3& dir) {
  const Vec3 o = pp.to_local.transform_point(origin);
  const Vec3 d = pp.to_local.rotate(dir);
  return std::visit(
      [&](const auto& s) -> std::optional<LocalHit> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Box>) {
          return hit_box(o, d, s);
        } else if constexpr (std::is_same_v<T, Cylinder>) {
          return hit_cylinder(o, d, s);
        } else {
          auto hit = hit_plane(o, d, s);
          if (hit && s.bounds) {
            const Vec2 c = pp.frame->coords(origin + hit->t * dir);
            const auto& b = *s.bounds;
            if (c.x() < b[0] || c.x() > b[1] || c.y() < b[2] || c.y() > b[3]) return std::nullopt;
          }
          return hit;
        }
      },
      pp.prim->shape);
}

std::vector<Prepared> prepare_renderable(const Scene& scene) {
  std::vector<Prepared> out;
  for (const auto& o : scene.objects)
    if (o.renderable) out.push_back(prepare(o));
  return out;
}

struct IndexedHit {
  double t;
  const Prepared* obj;
  Vec3 local_normal;
};

std::optional<IndexedHit> nearest(const std::vector<Prepared>& objs, const Vec3& origin, const Vec3& dir) {
  std::optional<IndexedHit> best;
  for (const auto& pp : objs) {
    const auto hit = intersect(pp, origin, dir);
    if (!hit) continue;
    if (!best || hit->t < best->t || (hit->t == best->t && pp.prim->id < best->obj->prim->id)) {
      best = IndexedHit{hit->t, &pp, hit->normal};
    }
  }
  return best;
}

Vec3 world_normal_facing(const IndexedHit& hit, const Vec3& dir) {
  Vec3 n = hit.obj->prim->pose.rotate(hit.local_normal).normalized();
  if (n.dot(dir) > 0.0) n = -n;
  return n;
}

Rgb shade(const Rgb& color, const Vec3& normal) {
  const double lambert = std::max(0.0, normal.dot(-kLightDirection));
  const double k = kAmbient + (1.0 - kAmbient) * lambert;
  Rgb out{};
  for (int c = 0; c < 3; ++c) {
    out[c] = static_cast<std::uint8_t>(std::clamp(std::lround(color[c] * k), 0L, 255L));
  }
  return out;
}

void require_geometry(const Scene& scene) {
  const auto violations = geometry_violations(scene);
  if (!violations.empty()) throw SceneError("invalid scene: " + violations.front());
}

std::size_t index_of(const Scene& scene, const Primitive* prim) {
  return static_cast<std::size_t>(prim - scene.objects.data());
}

}  // namespace

std::optional<double> ray_primitive_intersect(const Vec3& origin, const Vec3& dir, const Primitive& prim) {
  const auto hit = intersect(prepare(prim), origin, dir);
  if (!hit) return std::nullopt;
  return hit->t;
}

std::optional<RayHit> cast_ray(const Scene& scene, const Vec3& origin, const Vec3& dir) {
  const auto objs = prepare_renderable(scene);
  const auto hit = nearest(objs, origin, dir);
  if (!hit) return std::nullopt;
  return RayHit{hit->t, index_of(scene, hit->obj->prim), world_normal_facing(*hit, dir)};
}

RenderResult render(const Scene& scene, const CameraModel& camera) {
  require_geometry(scene);
  const auto objs = prepare_renderable(scene);
  const Intrinsics intr = camera.intrinsics();
  const Vec3 origin = camera.position();

  RenderResult out{RasterImage(camera.width, camera.height, kBackgroundColor), DepthImage(camera.width, camera.height)};
  for (int y = 0; y < camera.height; ++y) {
    for (int x = 0; x < camera.width; ++x) {
      const Vec3 dir = camera.pose.rotate(pixel_ray(intr, Vec2(x + 0.5, y + 0.5)));
      const auto hit = nearest(objs, origin, dir);
      if (!hit) continue;
      out.depth.at(x, y) = hit->t;
      out.raster.set(x, y, shade(hit->obj->prim->color, world_normal_facing(*hit, dir)));
    }
  }
  return out;
}

std::optional<double> pixel_range(const Scene& scene, const CameraModel& camera, const Vec2& pixel) {
  const Vec3 dir = camera.pose.rotate(pixel_ray(camera.intrinsics(), pixel));
  const auto hit = nearest(prepare_renderable(scene), camera.position(), dir);
  if (!hit) return std::nullopt;
  return hit->t;
}

ObjectIdImage render_object_ids(const Scene& scene, const CameraModel& camera) {
  require_geometry(scene);
  const auto objs = prepare_renderable(scene);
  const Intrinsics intr = camera.intrinsics();
  ObjectIdImage out{camera.width, camera.height,
                    std::vector<int>(static_cast<std::size_t>(camera.width) * camera.height, -1)};
  for (int y = 0; y < camera.height; ++y) {
    for (int x = 0; x < camera.width; ++x) {
      const Vec3 dir = camera.pose.rotate(pixel_ray(intr, Vec2(x + 0.5, y + 0.5)));
      const auto hit = nearest(objs, camera.position(), dir);
      if (hit) out.ids[static_cast<std::size_t>(y) * camera.width + x] = static_cast<int>(index_of(scene, hit->obj->prim));
    }
  }
  return out;
}

}  // namespace goalimagine
