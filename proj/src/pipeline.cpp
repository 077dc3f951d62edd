#include "goalimagine/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>

#include "goalimagine/backprojection.hpp"
#include "goalimagine/edge_map.hpp"
#include "goalimagine/render.hpp"

namespace goalimagine {

using nlohmann::json;

namespace {

json vec_json(const Vec3& v) { return {v.x(), v.y(), v.z()}; }
json vec_json(const Vec2& v) { return {v.x(), v.y()}; }
json quat_json(const Quat& q) { return {q.w(), q.x(), q.y(), q.z()}; }
json pose_json(const Pose& p) { return {{"position", vec_json(p.position)}, {"quat", quat_json(p.orientation)}}; }

json verdict_json(const Verdict& v) { return {{"valid", v.valid}, {"violations", v.violations}, {"score", v.score}}; }

json bbox_json(const BBox& b) { return {b.x_min, b.y_min, b.x_max, b.y_max}; }

std::string event_name(GripperEvent e) {
  switch (e) {
    case GripperEvent::Grasp: return "grasp";
    case GripperEvent::Release: return "release";
    default: return "none";
  }
}

std::string random_run_id() {
  std::random_device rd;
  std::ostringstream out;
  out << std::hex << rd() << rd();
  return out.str();
}

class StageTimer {
 public:
  StageTimer(RunManifest& m, std::string stage)
      : m_(m), stage_(std::move(stage)), start_(std::chrono::steady_clock::now()) {}
  ~StageTimer() {
    const auto dt = std::chrono::steady_clock::now() - start_;
    m_.timings_ms[stage_] += std::chrono::duration<double, std::milli>(dt).count();
  }

 private:
  RunManifest& m_;
  std::string stage_;
  std::chrono::steady_clock::time_point start_;
};

std::string candidate_stem(int round, int index) {
  const std::string base = "candidate_" + std::to_string(index);
  return round == 0 ? base : "round" + std::to_string(round) + "_" + base;
}

const Primitive& task_object_of(const Scene& scene) {
  const Primitive* obj = scene.find_label(task_object_label(scene.task));
  if (obj == nullptr) throw SceneError("scene has no " + std::string(task_object_label(scene.task)));
  return *obj;
}

DetectionRecord score_detection(const Scene& scene, const DepthImage& depth, const PlacementRules& rules,
                                const Detection& det) {
  DetectionRecord rec{det, std::nullopt, Verdict{false, {}, 0.0}, {}};
  const Primitive& object = task_object_of(scene);
  try {
    GoalEstimate goal;
    goal.task_object = object.label;
    goal.candidate_index = det.candidate_index;
    if (scene.task == Task::PlaceBowlOnTable) {
      const TableEstimate est = estimate_table_pose(scene.camera, depth, det, rules.bowl_radius_m);
      goal.goal_position = est.point;
      goal.estimator = "depth_ray";
      goal.anchor_pixel = est.anchor;
      rec.verdict = check_table_placement(scene, est.point, rules);
    } else {
      if (!scene.wall_refs) throw BackprojectionError("scene has no wall_refs");
      const WallEstimate est = estimate_wall_pose(det, *scene.wall_refs, scene);
      goal.goal_position = est.center;
      goal.goal_extents_m = est.extents_m;
      goal.estimator = "wall_refs";
      goal.anchor_pixel = est.anchor;
      rec.verdict = check_wall_placement(scene, est.center, est.extents_m, rules);
    }
    goal.goal_pose = goal_pose_for(scene, object, goal.goal_position);
    rec.goal = goal;
  } catch (const std::exception& e) {
    rec.error = e.what();
    rec.verdict = Verdict{false, {std::string("estimation failed: ") + e.what()}, 0.0};
  }
  return rec;
}

Verdict final_placement_check(const Scene& scene, const Primitive& object, const Pose& final_pose,
                              const PlacementRules& rules) {
  if (const auto* cyl = std::get_if<Cylinder>(&object.shape)) {
    return check_table_placement(scene, final_pose.position - Vec3(0.0, 0.0, cyl->height / 2.0), rules);
  }
  const auto& box = std::get<Box>(object.shape);
  const Primitive* wall = scene.find_label("wall");
  if (wall == nullptr) throw PlacementError("scene has no wall");
  const Vec3 back = final_pose.transform_point(Vec3(0.0, box.half_extents.y(), 0.0));
  Verdict v = check_wall_placement(scene, back, Vec2(2.0 * box.half_extents.x(), 2.0 * box.half_extents.z()), rules);
  const PlaneFrame frame = plane_frame(*wall);
  const Vec3 n = room_facing_normal(scene, *wall);
  if (std::abs(frame.signed_distance(back)) > 1e-9) {
    v.valid = false;
    v.violations.emplace_back("not flush with wall");
  }
  if ((final_pose.rotate(-Vec3::UnitY()) - n).norm() > 1e-9) {
    v.valid = false;
    v.violations.emplace_back("frame normal not aligned with wall normal");
  }
  return v;
}

}  // namespace

bool CandidateRecord::valid() const {
  for (const auto& d : detections) {
    if (d.verdict.valid) return true;
  }
  return false;
}

json to_json(const Trajectory& traj) {
  json wps = json::array();
  for (const auto& w : traj.waypoints) {
    wps.push_back({{"t", w.t},
                   {"position", vec_json(w.gripper.position)},
                   {"quat", quat_json(w.gripper.orientation)},
                   {"event", event_name(w.event)}});
  }
  return {{"object_id", traj.object_id}, {"speed_mps", traj.speed_mps}, {"waypoints", wps}};
}

json to_json(const GoalEstimate& goal) {
  return {{"task_object", goal.task_object},
          {"goal_position", vec_json(goal.goal_position)},
          {"goal_extents_m", goal.goal_extents_m ? vec_json(*goal.goal_extents_m) : json(nullptr)},
          {"estimator", goal.estimator},
          {"anchor_pixel", vec_json(goal.anchor_pixel)},
          {"candidate_index", goal.candidate_index}};
}

json to_json(const GenParams& p) {
  return {{"guidance", p.guidance}, {"steps", p.steps}, {"sampler", p.sampler}, {"scheduler", p.scheduler},
          {"cfg", p.cfg},           {"batch", p.batch}, {"seed", p.seed}};
}

json RunManifest::to_json() const {
  json doc;
  doc["run_id"] = run_id;
  doc["scene_path"] = scene_path;
  doc["prompt"] = prompt;
  doc["params"] = params.empty() ? json(nullptr) : goalimagine::to_json(params.front());
  doc["rounds"] = json::array();
  for (const auto& p : params) doc["rounds"].push_back(goalimagine::to_json(p));

  doc["candidates"] = json::array();
  for (const auto& c : candidates) {
    json dets = json::array();
    for (const auto& d : c.detections) {
      json jd = {{"label", d.detection.label},
                 {"bbox", bbox_json(d.detection.bbox)},
                 {"confidence", d.detection.confidence},
                 {"estimate", d.goal ? goalimagine::to_json(*d.goal) : json(nullptr)},
                 {"verdict", verdict_json(d.verdict)}};
      if (!d.error.empty()) jd["error"] = d.error;
      dets.push_back(jd);
    }
    json jc = {{"round", c.round},
               {"candidate_index", c.candidate_index},
               {"request_id", c.request_id},
               {"image", c.image_file},
               {"overlay", c.overlay_file},
               {"detections", dets},
               {"rejected_low_confidence", c.rejected_low_confidence},
               {"valid", c.valid()}};
    if (!c.error.empty()) jc["error"] = c.error;
    doc["candidates"].push_back(jc);
  }

  if (winner) {
    doc["winner"] = {{"round", winner->round},
                     {"candidate_index", winner->candidate_index},
                     {"confidence", winner->confidence},
                     {"estimate", goalimagine::to_json(winner->goal)},
                     {"goal_pose", pose_json(winner->goal.goal_pose)}};
  } else {
    doc["winner"] = nullptr;
  }
  doc["trajectory"] = trajectory ? goalimagine::to_json(*trajectory) : json(nullptr);
  if (execution) {
    doc["execution"] = {{"success", execution->success},
                        {"max_clearance_violation_m", execution->max_clearance_violation_m},
                        {"min_separation_m", execution->min_separation_m},
                        {"final_pose", pose_json(execution->final_pose)}};
  } else {
    doc["execution"] = nullptr;
  }
  doc["final_check"] = final_check ? verdict_json(*final_check) : json(nullptr);
  doc["success"] = success;
  doc["exit_code"] = exit_code;
  doc["timings_ms"] = timings_ms;
  doc["errors"] = json::array();
  for (const auto& e : errors) doc["errors"].push_back({{"stage", e.stage}, {"message", e.message}});
  doc["files"] = files;
  return doc;
}

std::string round_request_id(std::uint64_t seed, int round) {
  return "req-" + std::to_string(seed) + "-" + std::to_string(round);
}

std::uint64_t round_seed(std::uint64_t seed, int round) {
  if (round == 0) return seed;
  // splitmix64 finalizer
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(round);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

RunManifest run_pipeline(const PipelineConfig& config) {
  namespace fs = std::filesystem;
  RunManifest m;
  m.run_id = random_run_id();
  m.scene_path = config.scene_path;

  const fs::path out(config.out_dir);
  auto save = [&](const std::string& name, std::string_view bytes) {
    write_file((out / name).string(), bytes);
    m.files.push_back(name);
  };
  auto fail = [&](const std::string& stage, const std::string& message) {
    m.errors.push_back({stage, message});
    m.exit_code = 1;
  };
  auto finish = [&]() -> RunManifest {
    try {
      fs::create_directories(out);
      m.files.push_back("manifest.json");
      write_file((out / "manifest.json").string(), m.to_json().dump(2) + "\n");
    } catch (const std::exception& e) {
      m.errors.push_back({"write", e.what()});
      m.exit_code = 1;
    }
    return m;
  };

  try {
    fs::create_directories(out);
  } catch (const std::exception& e) {
    fail("write", e.what());
    return m;
  }

  Scene scene;
  try {
    StageTimer t(m, "load_scene");
    scene = load_scene(config.scene_path);
    const auto problems = validate_scene(scene);
    if (!problems.empty()) throw SceneError("invalid scene: " + problems.front());
  } catch (const std::exception& e) {
    fail("load_scene", e.what());
    return finish();
  }
  m.prompt = task_prompt(scene.task);

  RenderResult base;
  EdgeMap edges;
  try {
    StageTimer t(m, "render");
    base = render(scene, scene.camera);
    save("render.ppm", encode_ppm(base.raster));
    save("depth.depth", encode_depth(base.depth));
  } catch (const std::exception& e) {
    fail("render", e.what());
    return finish();
  }
  try {
    StageTimer t(m, "canny");
    edges = canny(base.raster);
    save("edges.pgm", encode_pgm(edges));
  } catch (const std::exception& e) {
    fail("canny", e.what());
    return finish();
  }

  const PlacementRules rules = rules_for_scene(scene);
  std::unique_ptr<GenerationBackend> generator;
  std::unique_ptr<DetectionBackend> detector;
  const auto truth = config.truth ? config.truth : std::make_shared<MockGroundTruth>();
  try {
    const std::chrono::seconds timeout(config.timeout_secs);
    if (config.backend == "mock") {
      generator = std::make_unique<MockGenerationBackend>(scene, rules, truth);
    } else if (config.backend == "http") {
      generator = std::make_unique<HttpGenerationBackend>(config.backend_url, timeout);
    } else {
      throw std::invalid_argument("unknown backend '" + config.backend + "'");
    }
    if (config.detector == "mock") {
      detector = std::make_unique<OracleDetectionBackend>(truth);
    } else if (config.detector == "http") {
      const LabelMap labels = config.labels_path.empty() ? default_label_map() : load_label_map(config.labels_path);
      detector = std::make_unique<HttpDetectionBackend>(config.detector_url, labels, timeout);
    } else {
      throw std::invalid_argument("unknown detector '" + config.detector + "'");
    }
  } catch (const std::exception& e) {
    fail("setup", e.what());
    return finish();
  }

  const std::string target(task_object_label(scene.task));
  const int rounds = std::max(1, config.max_rounds);
  for (int round = 0; round < rounds && !m.winner; ++round) {
    GenRequest request;
    request.edge_map = edges;
    request.prompt = m.prompt;
    request.params = default_params();
    request.params.batch = config.batch;
    request.params.seed = round_seed(config.seed, round);
    request.request_id = round_request_id(config.seed, round);
    m.params.push_back(request.params);

    std::vector<CandidateImage> images;
    try {
      StageTimer t(m, "generate");
      images = generate_candidates(request, *generator);
    } catch (const std::exception& e) {
      fail("generate", e.what());
      return finish();
    }

    std::vector<ScoredCandidate> scored;
    std::vector<std::pair<std::size_t, std::size_t>> scored_at;  // (candidate record, detection)
    for (const auto& img : images) {
      CandidateRecord rec;
      rec.round = round;
      rec.candidate_index = img.candidate_index;
      rec.request_id = img.request_id;
      const std::string stem = candidate_stem(round, img.candidate_index);
      rec.image_file = stem + ".ppm";
      rec.overlay_file = stem + "_overlay.ppm";
      save(rec.image_file, encode_ppm(img.image));

      std::vector<Detection> kept;
      try {
        StageTimer t(m, "detect");
        const auto all = detect(img, target, *detector);
        kept = filter_detections(all, config.min_confidence);
        rec.rejected_low_confidence = static_cast<int>(all.size() - kept.size());
      } catch (const std::exception& e) {
        rec.error = e.what();
        fail("detect", "candidate " + std::to_string(img.candidate_index) + ": " + e.what());
      }

      RasterImage overlay = img.image;
      {
        StageTimer t(m, "estimate");
        for (const auto& det : kept) {
          rec.detections.push_back(score_detection(scene, base.depth, rules, det));
          draw_box(overlay, static_cast<int>(std::floor(det.bbox.x_min)), static_cast<int>(std::floor(det.bbox.y_min)),
                   static_cast<int>(std::ceil(det.bbox.x_max)), static_cast<int>(std::ceil(det.bbox.y_max)),
                   {255, 0, 0}, 2);
        }
      }
      save(rec.overlay_file, encode_ppm(overlay));

      m.candidates.push_back(std::move(rec));
      const auto& stored = m.candidates.back();
      for (std::size_t d = 0; d < stored.detections.size(); ++d) {
        const auto& dr = stored.detections[d];
        if (!dr.goal) continue;
        scored.push_back({dr.detection, *dr.goal, dr.verdict});
        scored_at.emplace_back(m.candidates.size() - 1, d);
      }
    }

    StageTimer t(m, "choose");
    if (const auto best = choose_candidate(scored)) {
      const auto& s = scored[*best];
      m.winner = RunManifest::Winner{round, s.goal.candidate_index, s.goal, s.detection.confidence};
    }
  }

  if (!m.winner) {
    if (m.errors.empty()) m.exit_code = 2;
    return finish();
  }

  const Primitive& object = task_object_of(scene);
  try {
    StageTimer t(m, "plan");
    const Pose& goal = m.winner->goal.goal_pose;
    m.trajectory = plan_pick_and_place(scene, object.id, goal, default_lift_height(scene, object.id, goal));
  } catch (const std::exception& e) {
    fail("plan", e.what());
    return finish();
  }
  try {
    StageTimer t(m, "execute");
    m.execution = execute(scene, *m.trajectory, {"a", "b", "c", "d"});
    for (const auto& [phase, image] : m.execution->snapshots) save("step_" + phase + ".ppm", encode_ppm(image));
    m.final_check = final_placement_check(scene, object, m.execution->final_pose, rules);
  } catch (const std::exception& e) {
    fail("execute", e.what());
    return finish();
  }

  if (!m.execution->success) fail("execute", "execution failed");
  else if (!m.final_check->valid) fail("execute", "final placement invalid");
  m.success = m.errors.empty();
  if (m.success) m.exit_code = 0;
  return finish();
}

}  // namespace goalimagine
