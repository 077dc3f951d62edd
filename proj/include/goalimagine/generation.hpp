#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "goalimagine/image.hpp"
#include "goalimagine/placement.hpp"
#include "goalimagine/scene.hpp"

namespace goalimagine {

class GenerationError : public std::runtime_error {
 public:
  GenerationError(std::string request_id, const std::string& message)
      : std::runtime_error(request_id.empty() ? message : "request " + request_id + ": " + message),
        request_id_(std::move(request_id)) {}
  const std::string& request_id() const { return request_id_; }

 private:
  std::string request_id_;
};

class SceneSaturated : public GenerationError {
 public:
  explicit SceneSaturated(std::string request_id = {}) : GenerationError(std::move(request_id), "scene saturated") {}
};

/// Sampling settings forwarded to the image generator.
struct GenParams {
  double guidance = 30.0;
  int steps = 20;
  std::string sampler = "euler";
  std::string scheduler = "normal";
  double cfg = 1.6;
  int batch = 4;
  std::uint64_t seed = 0;

  bool operator==(const GenParams&) const = default;
};

GenParams default_params();
void validate(const GenParams& params);

std::string task_prompt(Task task);

struct GenRequest {
  EdgeMap edge_map;
  std::string prompt;
  GenParams params;
  std::string request_id;
};

struct CandidateImage {
  RasterImage image;
  int candidate_index = 0;
  std::string request_id;
  std::string backend_name;
};

class GenerationBackend {
 public:
  virtual ~GenerationBackend() = default;
  virtual std::string name() const = 0;
  /// Returns one image per batch slot, in any order.
  virtual std::vector<CandidateImage> generate(const GenRequest& request) = 0;
};

/// Validates the request, calls the backend and checks the batch contract.
/// Results come back sorted by candidate_index.
std::vector<CandidateImage> generate_candidates(const GenRequest& request, GenerationBackend& backend);

// ---------------------------------------------------------------------------
// Deterministic mock generator

inline constexpr int kMockMaxSamples = 10'000;

enum class SaturationPolicy {
  Throw,       // raise SceneSaturated
  BestEffort,  // composite at the least-violating sample
};

struct MockComposition {
  RasterImage image;
  Pose ground_truth;
  Scene composed;        // input scene with the task object at ground_truth and renderable
  std::string object_id;
  bool valid = true;     // false only for BestEffort fallbacks
};

/// Samples a goal pose for the task object from a PRNG seeded with seed ⊕ candidate_index,
/// checks it with the placement rules, inserts the object and renders the result.
MockComposition mock_compose(const Scene& scene, std::uint64_t seed, int candidate_index,
                             const PlacementRules& rules, SaturationPolicy policy = SaturationPolicy::Throw);

/// Ground truth of every mock candidate, keyed by (request_id, candidate_index).
/// Shared between the mock generator and the oracle detector; thread-safe.
class MockGroundTruth {
 public:
  struct Entry {
    Scene composed;
    std::string object_id;
    Pose pose;
    bool valid;
    std::shared_ptr<const RasterImage> base_render;
  };

  void record(const std::string& request_id, int candidate_index, Entry entry);
  std::optional<Entry> lookup(const std::string& request_id, int candidate_index) const;

 private:
  mutable std::mutex mutex_;
  std::map<std::pair<std::string, int>, Entry> entries_;
};

class MockGenerationBackend : public GenerationBackend {
 public:
  MockGenerationBackend(Scene scene, PlacementRules rules, std::shared_ptr<MockGroundTruth> truth);

  std::string name() const override { return "mock"; }
  std::vector<CandidateImage> generate(const GenRequest& request) override;

  const RasterImage& base_render() const { return *base_render_; }

 private:
  Scene scene_;
  PlacementRules rules_;
  std::shared_ptr<MockGroundTruth> truth_;
  std::shared_ptr<const RasterImage> base_render_;
};

// ---------------------------------------------------------------------------
// HTTP generator client (POST /v1/generate)

class HttpGenerationBackend : public GenerationBackend {
 public:
  HttpGenerationBackend(std::string base_url, std::chrono::seconds timeout = std::chrono::seconds(120));

  std::string name() const override { return "http"; }
  std::vector<CandidateImage> generate(const GenRequest& request) override;

 private:
  std::string base_url_;
  std::chrono::seconds timeout_;
};

}  // namespace goalimagine
