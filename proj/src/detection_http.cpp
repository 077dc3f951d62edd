#include "goalimagine/detection.hpp"
#include "goalimagine/wire.hpp"

#include <algorithm>

#include <httplib.h>
#include <json.hpp>

namespace goalimagine {

LabelMap default_label_map() { return {{"bowl", {"Bowl"}}, {"picture_frame", {"Picture frame"}}}; }

LabelMap load_label_map(const std::string& path) {
  const auto doc = nlohmann::json::parse(read_file(path), nullptr, false);
  if (!doc.is_object()) throw DetectionError("label map '" + path + "' must be a JSON object");
  LabelMap map;
  for (const auto& [canonical, names] : doc.items()) {
    if (!names.is_array()) throw DetectionError("label map entry '" + canonical + "' must be an array");
    for (const auto& n : names) map[canonical].push_back(n.get<std::string>());
  }
  for (const char* required : {"bowl", "picture_frame"}) {
    if (!map.count(required)) throw DetectionError(std::string("label map lacks '") + required + "'");
  }
  return map;
}

HttpDetectionBackend::HttpDetectionBackend(std::string base_url, LabelMap labels, std::chrono::seconds timeout)
    : base_url_(std::move(base_url)), labels_(std::move(labels)), timeout_(timeout) {}

std::vector<Detection> HttpDetectionBackend::detect(const CandidateImage& image, const std::string& target_label) {
  std::vector<std::string> model_labels{target_label};
  if (const auto it = labels_.find(target_label); it != labels_.end()) model_labels = it->second;

  httplib::Client client(base_url_);
  if (!client.is_valid()) throw DetectionError("invalid detector url '" + base_url_ + "'");
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  client.set_write_timeout(timeout_);

  const auto res = client.Post("/v1/detect", wire::detect_request(image.image, model_labels).dump(), "application/json");
  if (!res) throw DetectionError("detector request failed (" + httplib::to_string(res.error()) + ")");
  if (res->status != 200)
    throw DetectionError("detector error " + std::to_string(res->status) + ": " + wire::error_message(res->body));

  std::vector<wire::RawDetection> raw;
  try {
    raw = wire::detect_response(nlohmann::json::parse(res->body));
  } catch (const std::exception& e) {
    throw DetectionError(std::string("malformed detector response: ") + e.what());
  }

  const double w = image.image.width;
  const double h = image.image.height;
  std::vector<Detection> out;
  for (const auto& r : raw) {
    const bool known = std::find(model_labels.begin(), model_labels.end(), r.label) != model_labels.end() ||
                       r.label == target_label;
    if (!known) continue;
    if (!(r.confidence >= 0.0 && r.confidence <= 1.0))
      throw DetectionError("malformed detector response: confidence outside [0, 1]");
    BBox b{std::clamp(r.bbox.x_min, 0.0, w), std::clamp(r.bbox.y_min, 0.0, h), std::clamp(r.bbox.x_max, 0.0, w),
           std::clamp(r.bbox.y_max, 0.0, h)};
    if (!bbox_valid(b, image.image.width, image.image.height)) continue;
    out.push_back({target_label, b, r.confidence, image.candidate_index});
  }
  return out;
}

}  // namespace goalimagine
