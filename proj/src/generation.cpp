#include "goalimagine/generation.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "goalimagine/render.hpp"

namespace goalimagine {

GenParams default_params() { return GenParams{}; }

void validate(const GenParams& p) {
  if (p.steps < 1) throw std::invalid_argument("steps must be >= 1");
  if (p.batch < 1) throw std::invalid_argument("batch must be >= 1");
  if (!(p.guidance >= 0.0)) throw std::invalid_argument("guidance must be >= 0");
  if (!(p.cfg >= 1.0)) throw std::invalid_argument("cfg must be >= 1.0");
}

std::string task_prompt(Task task) {
  switch (task) {
    case Task::PlaceBowlOnTable:
      return "A room with a single bowl and glasses on a table";
    case Task::HangFrameOnWall:
      return "A room with a plant, a cupboard and a picture frame hanging on the wall";
  }
  return {};
}

std::vector<CandidateImage> generate_candidates(const GenRequest& request, GenerationBackend& backend) {
  try {
    validate(request.params);
  } catch (const std::invalid_argument& e) {
    throw GenerationError(request.request_id, e.what());
  }
  if (request.prompt.empty()) throw GenerationError(request.request_id, "prompt must not be empty");
  if (request.edge_map.width <= 0 || request.edge_map.height <= 0)
    throw GenerationError(request.request_id, "edge map is empty");

  auto candidates = backend.generate(request);
  const auto batch = static_cast<std::size_t>(request.params.batch);
  if (candidates.size() < batch)
    throw GenerationError(request.request_id, "incomplete batch: got " + std::to_string(candidates.size()) + " of " +
                                                  std::to_string(batch) + " images");
  if (candidates.size() > batch)
    throw GenerationError(request.request_id, "unexpected batch size " + std::to_string(candidates.size()));

  std::sort(candidates.begin(), candidates.end(),
            [](const CandidateImage& a, const CandidateImage& b) { return a.candidate_index < b.candidate_index; });
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& c = candidates[i];
    if (c.candidate_index != static_cast<int>(i))
      throw GenerationError(request.request_id, "candidate indices are not 0.." + std::to_string(batch - 1));
    if (c.request_id != request.request_id)
      throw GenerationError(request.request_id, "candidate carries request_id '" + c.request_id + "'");
    if (c.image.width != request.edge_map.width || c.image.height != request.edge_map.height)
      throw GenerationError(request.request_id, "dimension mismatch: candidate " + std::to_string(i) + " is " +
                                                    std::to_string(c.image.width) + "x" +
                                                    std::to_string(c.image.height));
  }
  return candidates;
}

// ---------------------------------------------------------------------------

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

Primitive task_object(const Scene& scene) {
  const auto label = task_object_label(scene.task);
  if (const auto* obj = scene.find_label(label)) return *obj;
  Primitive prim;
  prim.id = std::string(label);
  prim.label = std::string(label);
  if (scene.task == Task::PlaceBowlOnTable) {
    prim.shape = Cylinder{0.07, 0.05};
    prim.color = {40, 90, 200};
  } else {
    prim.shape = Box{Vec3(0.25, 0.01, 0.2)};
    prim.color = {30, 60, 160};
  }
  return prim;
}

struct Sample {
  Vec3 point;
  Verdict verdict;
};

// Least-violating sample seen so far: fewest violations, then highest score, then earliest.
void keep_best(std::optional<Sample>& best, Sample s) {
  if (!best || s.verdict.violations.size() < best->verdict.violations.size() ||
      (s.verdict.violations.size() == best->verdict.violations.size() && s.verdict.score > best->verdict.score)) {
    best = std::move(s);
  }
}

}  // namespace

MockComposition mock_compose(const Scene& scene, std::uint64_t seed, int candidate_index,
                             const PlacementRules& rules, SaturationPolicy policy) {
  std::mt19937_64 rng(seed ^ static_cast<std::uint64_t>(candidate_index));
  Primitive object = task_object(scene);

  std::optional<Sample> accepted;
  std::optional<Sample> best;
  if (scene.task == Task::PlaceBowlOnTable) {
    const auto* table = scene.find_label("table");
    const auto* top = table ? std::get_if<Box>(&table->shape) : nullptr;
    if (top == nullptr) throw GenerationError({}, "mock generator needs a box labeled 'table'");
    const Vec3 he = top->half_extents;
    for (int s = 0; s < kMockMaxSamples && !accepted; ++s) {
      const double x = uniform(rng, -he.x(), he.x());
      const double y = uniform(rng, -he.y(), he.y());
      const Vec3 p = table->pose.transform_point(Vec3(x, y, he.z()));
      Sample sample{p, check_table_placement(scene, p, rules)};
      if (sample.verdict.valid) accepted = sample;
      keep_best(best, std::move(sample));
    }
  } else {
    const auto* wall = scene.find_label("wall");
    const auto* plane = wall ? std::get_if<Plane>(&wall->shape) : nullptr;
    if (plane == nullptr || !plane->bounds) throw GenerationError({}, "mock generator needs a bounded plane labeled 'wall'");
    const auto* box = std::get_if<Box>(&object.shape);
    if (box == nullptr) throw GenerationError({}, "picture frame must be a box");
    const Vec2 extents(2.0 * box->half_extents.x(), 2.0 * box->half_extents.z());
    const PlaneFrame frame = plane_frame(*wall);
    const auto& b = *plane->bounds;
    for (int s = 0; s < kMockMaxSamples && !accepted; ++s) {
      const double h = uniform(rng, b[0], b[1]);
      const double v = uniform(rng, b[2], b[3]);
      const Vec3 p = frame.point(h, v);
      Sample sample{p, check_wall_placement(scene, p, extents, rules)};
      if (sample.verdict.valid) accepted = sample;
      keep_best(best, std::move(sample));
    }
  }

  if (!accepted && policy == SaturationPolicy::Throw) throw SceneSaturated();
  const Sample& chosen = accepted ? *accepted : *best;

  MockComposition out;
  out.ground_truth = goal_pose_for(scene, object, chosen.point);
  out.valid = accepted.has_value();
  out.composed = scene;
  out.object_id = object.id;
  Primitive* slot = out.composed.find(object.id);
  if (slot == nullptr) {
    out.composed.objects.push_back(object);
    slot = &out.composed.objects.back();
  }
  slot->pose = out.ground_truth;
  slot->renderable = true;
  out.image = render(out.composed, out.composed.camera).raster;
  return out;
}

void MockGroundTruth::record(const std::string& request_id, int candidate_index, Entry entry) {
  std::lock_guard lock(mutex_);
  entries_.insert_or_assign({request_id, candidate_index}, std::move(entry));
}

std::optional<MockGroundTruth::Entry> MockGroundTruth::lookup(const std::string& request_id,
                                                              int candidate_index) const {
  std::lock_guard lock(mutex_);
  const auto it = entries_.find({request_id, candidate_index});
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

MockGenerationBackend::MockGenerationBackend(Scene scene, PlacementRules rules, std::shared_ptr<MockGroundTruth> truth)
    : scene_(std::move(scene)), rules_(rules), truth_(std::move(truth)) {
  if (!truth_) truth_ = std::make_shared<MockGroundTruth>();
  base_render_ = std::make_shared<const RasterImage>(render(scene_, scene_.camera).raster);
}

std::vector<CandidateImage> MockGenerationBackend::generate(const GenRequest& request) {
  if (request.edge_map.width != scene_.camera.width || request.edge_map.height != scene_.camera.height)
    throw GenerationError(request.request_id, "dimension mismatch: edge map does not match the mock scene camera");
  std::vector<CandidateImage> out;
  out.reserve(static_cast<std::size_t>(request.params.batch));
  for (int i = 0; i < request.params.batch; ++i) {
    auto comp = mock_compose(scene_, request.params.seed, i, rules_, SaturationPolicy::BestEffort);
    truth_->record(request.request_id, i,
                   {comp.composed, comp.object_id, comp.ground_truth, comp.valid, base_render_});
    out.push_back({std::move(comp.image), i, request.request_id, name()});
  }
  return out;
}

}  // namespace goalimagine
