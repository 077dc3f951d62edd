#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "goalimagine/detection.hpp"
#include "goalimagine/executor.hpp"
#include "goalimagine/generation.hpp"
#include "goalimagine/placement.hpp"

namespace goalimagine {

struct PipelineConfig {
  std::string scene_path;
  std::string backend = "mock";  // mock | http
  std::string backend_url;
  std::string detector = "mock";  // mock | http
  std::string detector_url;
  std::string labels_path;  // detector label map; built-in map when empty
  std::uint64_t seed = 0;
  int batch = 4;
  std::string out_dir = "out";
  int max_rounds = 1;
  int timeout_secs = 120;
  double min_confidence = kDefaultMinConfidence;
  /// Mock ground-truth registry; a private one is created when null.
  std::shared_ptr<MockGroundTruth> truth;
};

struct DetectionRecord {
  Detection detection;
  std::optional<GoalEstimate> goal;
  Verdict verdict;
  std::string error;  // estimation failure, empty otherwise
};

struct CandidateRecord {
  int round = 0;
  int candidate_index = 0;
  std::string request_id;
  std::string image_file;
  std::string overlay_file;
  std::vector<DetectionRecord> detections;  // after the confidence filter
  int rejected_low_confidence = 0;
  std::string error;

  bool valid() const;
};

struct StageError {
  std::string stage;
  std::string message;
};

struct RunManifest {
  std::string run_id;
  std::string scene_path;
  std::string prompt;
  std::vector<GenParams> params;  // one per round
  std::vector<CandidateRecord> candidates;
  struct Winner {
    int round;
    int candidate_index;
    GoalEstimate goal;
    double confidence;
  };
  std::optional<Winner> winner;
  std::optional<Trajectory> trajectory;
  std::optional<ExecutionReport> execution;
  std::optional<Verdict> final_check;  // placement check of the object's final pose
  bool success = false;
  int exit_code = 1;
  std::map<std::string, double> timings_ms;
  std::vector<StageError> errors;
  std::vector<std::string> files;  // relative to the output directory

  nlohmann::json to_json() const;
};

nlohmann::json to_json(const Trajectory& traj);
nlohmann::json to_json(const GoalEstimate& goal);
nlohmann::json to_json(const GenParams& params);

/// Request id of generation round `round`.
std::string round_request_id(std::uint64_t seed, int round);
/// Generator seed of round `round`; round 0 uses `seed` itself.
std::uint64_t round_seed(std::uint64_t seed, int round);

/// Runs the whole pipeline, writes every artifact plus manifest.json to
/// `config.out_dir` and returns the manifest. Never throws for stage failures;
/// they end up in `errors` with exit_code 1.
RunManifest run_pipeline(const PipelineConfig& config);

}  // namespace goalimagine
