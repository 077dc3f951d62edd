#include "goalimagine/scene.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <tuple>

#include <json.hpp>

namespace goalimagine {

using nlohmann::json;

Intrinsics camera_intrinsics(double fov_deg, int width, int height) {
  if (!(fov_deg > 0.0 && fov_deg < 180.0)) {
    throw SceneError("fov_deg must lie in (0, 180), got " + std::to_string(fov_deg));
  }
  if (width <= 0 || height <= 0) throw SceneError("image dimensions must be positive");
  const double half = deg_to_rad(fov_deg) / 2.0;
  return {(width / 2.0) / std::tan(half), width / 2.0, height / 2.0};
}

Intrinsics CameraModel::intrinsics() const {
  return camera_intrinsics(fov_horizontal_deg, width, height);
}

CameraModel camera_look_at(const Vec3& position, const Vec3& target, double fov_deg,
                           int width, int height) {
  const Vec3 view = target - position;
  if (view.norm() == 0.0) throw SceneError("camera look_at equals position");
  const Vec3 forward = view.normalized();
  const Vec3 side = forward.cross(Vec3::UnitZ());
  if (side.norm() < 1e-9) throw SceneError("camera view direction is parallel to world z");
  const Vec3 right = side.normalized();
  const Vec3 down = forward.cross(right);

  Eigen::Matrix3d rot;
  rot.col(0) = right;
  rot.col(1) = down;
  rot.col(2) = forward;

  CameraModel cam;
  cam.pose = Pose(position, Quat(rot));
  cam.fov_horizontal_deg = fov_deg;
  cam.width = width;
  cam.height = height;
  return cam;
}

std::string_view task_name(Task task) {
  return task == Task::PlaceBowlOnTable ? "place_bowl_on_table" : "hang_frame_on_wall";
}

std::string_view task_object_label(Task task) {
  return task == Task::PlaceBowlOnTable ? "bowl" : "picture_frame";
}

const Primitive* Scene::find(std::string_view id) const {
  for (const auto& o : objects)
    if (o.id == id) return &o;
  return nullptr;
}

Primitive* Scene::find(std::string_view id) {
  for (auto& o : objects)
    if (o.id == id) return &o;
  return nullptr;
}

const Primitive* Scene::find_label(std::string_view label) const {
  for (const auto& o : objects)
    if (o.label == label) return &o;
  return nullptr;
}

std::size_t Scene::count_label(std::string_view label) const {
  return static_cast<std::size_t>(
      std::count_if(objects.begin(), objects.end(), [&](const Primitive& o) { return o.label == label; }));
}

PlaneFrame plane_frame(const Primitive& prim) {
  const auto* plane = std::get_if<Plane>(&prim.shape);
  if (plane == nullptr) throw SceneError("object '" + prim.id + "' is not a plane");

  const Vec3 n = prim.pose.rotate(plane->normal).normalized();
  Vec3 up = Vec3::UnitZ() - Vec3::UnitZ().dot(n) * n;
  if (up.norm() < 1e-6) up = Vec3::UnitX() - Vec3::UnitX().dot(n) * n;
  up.normalize();

  PlaneFrame frame;
  frame.normal = n;
  frame.vertical = up;
  frame.horizontal = up.cross(n);
  frame.origin = prim.pose.transform_point(plane->offset * plane->normal.normalized());
  return frame;
}

namespace {

struct Violation {
  std::string subject;
  std::string rule;
  std::string detail;
};

std::vector<std::string> render(std::vector<Violation> vs) {
  std::stable_sort(vs.begin(), vs.end(), [](const Violation& a, const Violation& b) {
    return std::tie(a.subject, a.rule) < std::tie(b.subject, b.rule);
  });
  std::vector<std::string> out;
  out.reserve(vs.size());
  for (const auto& v : vs) out.push_back(v.subject + ": " + v.rule + " (" + v.detail + ")");
  return out;
}

void collect_geometry(const Scene& scene, std::vector<Violation>& out) {
  std::map<std::string, int> seen;
  for (const auto& o : scene.objects) ++seen[o.id];
  for (const auto& [id, n] : seen) {
    if (n > 1) out.push_back({id, "unique_id", std::to_string(n) + " objects share this id"});
  }

  for (const auto& o : scene.objects) {
    if (o.id.empty()) out.push_back({o.id, "non_empty_id", "object id is empty"});
    if (std::abs(o.pose.orientation.norm() - 1.0) > 1e-9) {
      out.push_back({o.id, "unit_quaternion", "orientation is not normalized"});
    }
    std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, Box>) {
            if (!(s.half_extents.array() > 0.0).all())
              out.push_back({o.id, "positive_dimensions", "box half-extents must be > 0"});
          } else if constexpr (std::is_same_v<T, Cylinder>) {
            if (!(s.radius > 0.0 && s.height > 0.0))
              out.push_back({o.id, "positive_dimensions", "cylinder radius and height must be > 0"});
          } else {
            if (std::abs(s.normal.norm() - 1.0) > 1e-9)
              out.push_back({o.id, "unit_normal", "plane normal must be unit length"});
            if (s.bounds && !((*s.bounds)[0] < (*s.bounds)[1] && (*s.bounds)[2] < (*s.bounds)[3]))
              out.push_back({o.id, "plane_bounds", "bounds must satisfy min < max"});
          }
        },
        o.shape);
  }

  const auto& cam = scene.camera;
  if (!(cam.fov_horizontal_deg > 0.0 && cam.fov_horizontal_deg < 180.0))
    out.push_back({"camera", "fov_range", "fov must lie in (0, 180)"});
  if (cam.width < 16 || cam.height < 16)
    out.push_back({"camera", "min_resolution", "width and height must be >= 16"});
  if (std::abs(cam.pose.orientation.norm() - 1.0) > 1e-9)
    out.push_back({"camera", "unit_quaternion", "orientation is not normalized"});
}

bool inside_image(const Vec2& px, const CameraModel& cam) {
  return px.x() >= 0.0 && px.y() >= 0.0 && px.x() <= cam.width && px.y() <= cam.height;
}

}  // namespace

std::vector<std::string> geometry_violations(const Scene& scene) {
  std::vector<Violation> vs;
  collect_geometry(scene, vs);
  return render(std::move(vs));
}

std::vector<std::string> validate_scene(const Scene& scene) {
  std::vector<Violation> vs;
  collect_geometry(scene, vs);

  if (scene.task == Task::PlaceBowlOnTable) {
    const auto tables = scene.count_label("table");
    if (tables != 1)
      vs.push_back({"table", "label_count", "expected exactly one table, found " + std::to_string(tables)});
  } else {
    for (const char* label : {"wall", "wardrobe"}) {
      const auto n = scene.count_label(label);
      if (n != 1)
        vs.push_back({label, "label_count",
                      std::string("expected exactly one ") + label + ", found " + std::to_string(n)});
    }
    if (!scene.wall_refs) {
      vs.push_back({"wall_refs", "required", "hang_frame_on_wall scenes need wall_refs"});
    } else {
      const auto& r = *scene.wall_refs;
      if (!(r.wardrobe_height_m > 0.0))
        vs.push_back({"wall_refs", "wardrobe_height_positive", "wardrobe_height_m must be > 0"});
      if (!(r.wall_segment_m > 0.0))
        vs.push_back({"wall_refs", "wall_segment_positive", "wall_segment_m must be > 0"});
      for (const auto& [name, px] : {std::pair{"wardrobe_top_px", r.wardrobe_top_px},
                                     std::pair{"wardrobe_base_px", r.wardrobe_base_px},
                                     std::pair{"wall_left_corner_px", r.wall_left_corner_px}}) {
        if (!inside_image(px, scene.camera))
          vs.push_back({"wall_refs", "pixel_in_bounds", std::string(name) + " lies outside the image"});
      }
      const auto* wall = scene.find(r.wall_plane);
      if (wall == nullptr || !wall->is_plane())
        vs.push_back({"wall_refs", "wall_plane", "'" + r.wall_plane + "' is not a plane object"});
    }
  }
  return render(std::move(vs));
}

std::pair<double, double> z_range(const Primitive& prim) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return std::visit(
      [&](const auto& s) -> std::pair<double, double> {
        using T = std::decay_t<decltype(s)>;
        const Eigen::Matrix3d r = prim.pose.orientation.toRotationMatrix();
        const double cz = prim.pose.position.z();
        if constexpr (std::is_same_v<T, Box>) {
          const double ext = r.row(2).cwiseAbs().dot(s.half_extents);
          return {cz - ext, cz + ext};
        } else if constexpr (std::is_same_v<T, Cylinder>) {
          const Vec3 axis = r.col(2);
          const double radial = std::sqrt(std::max(0.0, 1.0 - axis.z() * axis.z()));
          const double ext = std::abs(axis.z()) * s.height / 2.0 + radial * s.radius;
          return {cz - ext, cz + ext};
        } else {
          const PlaneFrame f = plane_frame(prim);
          if (std::abs(std::abs(f.normal.z()) - 1.0) < 1e-12) return {f.origin.z(), f.origin.z()};
          if (s.bounds && std::abs(f.normal.z()) < 1e-12) {
            return {f.origin.z() + (*s.bounds)[2] * f.vertical.z(), f.origin.z() + (*s.bounds)[3] * f.vertical.z()};
          }
          return {-inf, inf};
        }
      },
      prim.shape);
}

// ---------------------------------------------------------------------------
// JSON

namespace {

Vec3 vec3_from(const json& j, const char* key) {
  const auto& a = j.at(key);
  if (!a.is_array() || a.size() != 3) throw SceneError(std::string("'") + key + "' must be a 3-array");
  return {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
}

Vec2 vec2_from(const json& j, const char* key) {
  const auto& a = j.at(key);
  if (!a.is_array() || a.size() != 2) throw SceneError(std::string("'") + key + "' must be a 2-array");
  return {a[0].get<double>(), a[1].get<double>()};
}

json to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }
json to_json(const Vec2& v) { return json::array({v.x(), v.y()}); }

Shape shape_from(const json& j) {
  const auto type = j.at("type").get<std::string>();
  if (type == "box") return Box{vec3_from(j, "half_extents")};
  if (type == "cylinder") return Cylinder{j.at("radius").get<double>(), j.at("height").get<double>()};
  if (type == "plane") {
    Plane p{vec3_from(j, "normal"), j.at("offset").get<double>(), std::nullopt};
    if (j.contains("bounds")) {
      const auto& b = j.at("bounds");
      if (!b.is_array() || b.size() != 4) throw SceneError("plane 'bounds' must be a 4-array");
      p.bounds = std::array<double, 4>{b[0].get<double>(), b[1].get<double>(), b[2].get<double>(),
                                       b[3].get<double>()};
    }
    return p;
  }
  throw SceneError("unknown shape type '" + type + "'");
}

json shape_to_json(const Shape& shape) {
  return std::visit(
      [](const auto& s) -> json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Box>) {
          return {{"type", "box"}, {"half_extents", to_json(s.half_extents)}};
        } else if constexpr (std::is_same_v<T, Cylinder>) {
          return {{"type", "cylinder"}, {"radius", s.radius}, {"height", s.height}};
        } else {
          json j = {{"type", "plane"}, {"normal", to_json(s.normal)}, {"offset", s.offset}};
          if (s.bounds) j["bounds"] = *s.bounds;
          return j;
        }
      },
      shape);
}

Rgb color_from(const json& j) {
  if (!j.is_array() || j.size() != 3) throw SceneError("'color' must be a 3-array");
  Rgb c{};
  for (std::size_t i = 0; i < 3; ++i) {
    const int v = j[i].get<int>();
    if (v < 0 || v > 255) throw SceneError("color channels must lie in 0..255");
    c[i] = static_cast<std::uint8_t>(v);
  }
  return c;
}

}  // namespace

Scene parse_scene(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SceneError(std::string("scene JSON parse error: ") + e.what());
  }

  try {
    Scene scene;
    const auto task = doc.at("task").get<std::string>();
    if (task == "place_bowl_on_table") {
      scene.task = Task::PlaceBowlOnTable;
    } else if (task == "hang_frame_on_wall") {
      scene.task = Task::HangFrameOnWall;
    } else {
      throw SceneError("unknown task '" + task + "'");
    }

    const auto& cam = doc.at("camera");
    scene.camera = camera_look_at(vec3_from(cam, "position"), vec3_from(cam, "look_at"),
                                  cam.at("fov_deg").get<double>(), cam.at("width").get<int>(),
                                  cam.at("height").get<int>());

    for (const auto& o : doc.at("objects")) {
      Primitive prim;
      prim.id = o.at("id").get<std::string>();
      prim.label = o.at("label").get<std::string>();
      prim.shape = shape_from(o.at("shape"));
      prim.pose = Pose::from_yaw(vec3_from(o, "position"), deg_to_rad(o.value("yaw_deg", 0.0)));
      if (o.contains("color")) prim.color = color_from(o.at("color"));
      prim.renderable = o.value("renderable", true);
      scene.objects.push_back(std::move(prim));
    }

    if (doc.contains("wall_refs") && !doc.at("wall_refs").is_null()) {
      const auto& r = doc.at("wall_refs");
      WallRefs refs;
      refs.wardrobe_height_m = r.at("wardrobe_height_m").get<double>();
      refs.wardrobe_top_px = vec2_from(r, "wardrobe_top_px");
      refs.wardrobe_base_px = vec2_from(r, "wardrobe_base_px");
      refs.wall_left_corner_px = vec2_from(r, "wall_left_corner_px");
      refs.wall_segment_m = r.at("wall_segment_m").get<double>();
      refs.wall_plane = r.at("wall_plane").get<std::string>();
      scene.wall_refs = refs;
    }
    return scene;
  } catch (const json::exception& e) {
    throw SceneError(std::string("scene JSON schema error: ") + e.what());
  }
}

Scene load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SceneError("cannot open scene file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scene(buf.str());
}

std::string scene_to_json(const Scene& scene) {
  json doc;
  doc["task"] = std::string(task_name(scene.task));
  const auto& cam = scene.camera;
  doc["camera"] = {{"position", to_json(cam.position())},
                   {"look_at", to_json(Vec3(cam.position() + cam.forward()))},
                   {"fov_deg", cam.fov_horizontal_deg},
                   {"width", cam.width},
                   {"height", cam.height}};
  doc["objects"] = json::array();
  for (const auto& o : scene.objects) {
    const Eigen::Matrix3d r = o.pose.orientation.toRotationMatrix();
    const double yaw = std::atan2(r(1, 0), r(0, 0)) * 180.0 / kPi;
    doc["objects"].push_back({{"id", o.id},
                              {"label", o.label},
                              {"shape", shape_to_json(o.shape)},
                              {"position", to_json(o.pose.position)},
                              {"yaw_deg", yaw},
                              {"color", {o.color[0], o.color[1], o.color[2]}},
                              {"renderable", o.renderable}});
  }
  if (scene.wall_refs) {
    const auto& r = *scene.wall_refs;
    doc["wall_refs"] = {{"wardrobe_height_m", r.wardrobe_height_m},
                        {"wardrobe_top_px", to_json(r.wardrobe_top_px)},
                        {"wardrobe_base_px", to_json(r.wardrobe_base_px)},
                        {"wall_left_corner_px", to_json(r.wall_left_corner_px)},
                        {"wall_segment_m", r.wall_segment_m},
                        {"wall_plane", r.wall_plane}};
  }
  return doc.dump(2);
}

}  // namespace goalimagine
