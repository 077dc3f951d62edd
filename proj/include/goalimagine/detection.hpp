#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "goalimagine/detection_types.hpp"
#include "goalimagine/generation.hpp"

namespace goalimagine {

class DetectionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kDefaultMinConfidence = 0.25;

class DetectionBackend {
 public:
  virtual ~DetectionBackend() = default;
  virtual std::string name() const = 0;
  virtual std::vector<Detection> detect(const CandidateImage& image, const std::string& target_label) = 0;
};

/// Runs the backend for one canonical label ("bowl" or "picture_frame"), checks
/// every box against the image and sorts by confidence descending, then (y_min, x_min).
std::vector<Detection> detect(const CandidateImage& image, const std::string& target_label,
                              DetectionBackend& backend);

/// Keeps detections with confidence >= min_confidence, preserving order.
std::vector<Detection> filter_detections(const std::vector<Detection>& dets, double min_confidence);

/// Reports the exact silhouette box of the mock-composited object (confidence 1).
/// Only the pixels where the candidate actually differs from the base render count.
class OracleDetectionBackend : public DetectionBackend {
 public:
  explicit OracleDetectionBackend(std::shared_ptr<const MockGroundTruth> truth) : truth_(std::move(truth)) {}

  std::string name() const override { return "mock"; }
  std::vector<Detection> detect(const CandidateImage& image, const std::string& target_label) override;

 private:
  std::shared_ptr<const MockGroundTruth> truth_;
};

/// Canonical label -> detector class names.
using LabelMap = std::map<std::string, std::vector<std::string>>;

LabelMap default_label_map();
LabelMap load_label_map(const std::string& path);

/// Client for POST /v1/detect.
class HttpDetectionBackend : public DetectionBackend {
 public:
  HttpDetectionBackend(std::string base_url, LabelMap labels = default_label_map(),
                       std::chrono::seconds timeout = std::chrono::seconds(120));

  std::string name() const override { return "http"; }
  std::vector<Detection> detect(const CandidateImage& image, const std::string& target_label) override;

 private:
  std::string base_url_;
  LabelMap labels_;
  std::chrono::seconds timeout_;
};

}  // namespace goalimagine
