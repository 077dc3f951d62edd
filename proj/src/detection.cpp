#include "goalimagine/detection.hpp"

#include <algorithm>
#include <climits>
#include <tuple>

#include "goalimagine/render.hpp"

namespace goalimagine {

std::vector<Detection> detect(const CandidateImage& image, const std::string& target_label,
                              DetectionBackend& backend) {
  if (target_label != "bowl" && target_label != "picture_frame")
    throw DetectionError("unsupported target label '" + target_label + "'");

  auto dets = backend.detect(image, target_label);
  for (auto& d : dets) {
    if (!bbox_valid(d.bbox, image.image.width, image.image.height))
      throw DetectionError(backend.name() + " detector returned a box outside the image");
    if (!(d.confidence >= 0.0 && d.confidence <= 1.0))
      throw DetectionError(backend.name() + " detector returned confidence outside [0, 1]");
    d.candidate_index = image.candidate_index;
  }
  dets.erase(std::remove_if(dets.begin(), dets.end(), [&](const Detection& d) { return d.label != target_label; }),
             dets.end());
  std::stable_sort(dets.begin(), dets.end(), [](const Detection& a, const Detection& b) {
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    return std::tie(a.bbox.y_min, a.bbox.x_min) < std::tie(b.bbox.y_min, b.bbox.x_min);
  });
  return dets;
}

std::vector<Detection> filter_detections(const std::vector<Detection>& dets, double min_confidence) {
  if (!(min_confidence >= 0.0 && min_confidence <= 1.0))
    throw std::invalid_argument("min_confidence must lie in [0, 1]");
  std::vector<Detection> out;
  std::copy_if(dets.begin(), dets.end(), std::back_inserter(out),
               [&](const Detection& d) { return d.confidence >= min_confidence; });
  return out;
}

std::vector<Detection> OracleDetectionBackend::detect(const CandidateImage& image, const std::string& target_label) {
  const auto entry = truth_ ? truth_->lookup(image.request_id, image.candidate_index) : std::nullopt;
  if (!entry) throw DetectionError("no ground truth available");

  const Primitive* object = entry->composed.find(entry->object_id);
  if (object == nullptr || object->label != target_label) return {};
  const auto object_index = static_cast<int>(object - entry->composed.objects.data());

  const auto& camera = entry->composed.camera;
  if (image.image.width != camera.width || image.image.height != camera.height)
    throw DetectionError("candidate image does not match the ground-truth camera");
  const ObjectIdImage ids = render_object_ids(entry->composed, camera);
  const RasterImage& base = *entry->base_render;

  int x0 = INT_MAX, y0 = INT_MAX, x1 = -1, y1 = -1;
  for (int y = 0; y < camera.height; ++y) {
    for (int x = 0; x < camera.width; ++x) {
      if (ids.at(x, y) != object_index || image.image.at(x, y) == base.at(x, y)) continue;
      x0 = std::min(x0, x);
      y0 = std::min(y0, y);
      x1 = std::max(x1, x);
      y1 = std::max(y1, y);
    }
  }
  if (x1 < 0) return {};
  return {Detection{target_label, BBox{double(x0), double(y0), double(x1 + 1), double(y1 + 1)}, 1.0,
                    image.candidate_index}};
}

}  // namespace goalimagine
