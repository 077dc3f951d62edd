#pragma once

// JSON bodies of the /v1/generate and /v1/detect protocols.

#include <string>
#include <vector>

#include <json.hpp>

#include "goalimagine/detection_types.hpp"
#include "goalimagine/generation.hpp"

namespace goalimagine::wire {

nlohmann::json generate_request(const GenRequest& request);

/// Decoded P6 images of a 200 response. Throws GenerationError on schema or
/// payload problems (wrong request_id, bad base64, bad P6).
std::vector<RasterImage> generate_response_images(const nlohmann::json& body, const std::string& request_id);

nlohmann::json detect_request(const RasterImage& image, const std::vector<std::string>& labels);

struct RawDetection {
  std::string label;
  BBox bbox;
  double confidence;
};

/// Throws std::invalid_argument on schema problems.
std::vector<RawDetection> detect_response(const nlohmann::json& body);

/// Message of a 4xx/5xx `{"error": s}` body, or the raw body when it is not that shape.
std::string error_message(const std::string& body);

}  // namespace goalimagine::wire
