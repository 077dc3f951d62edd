#include "goalimagine/wire.hpp"

#include <stdexcept>

#include "goalimagine/base64.hpp"

namespace goalimagine::wire {

using nlohmann::json;

json generate_request(const GenRequest& request) {
  const auto& p = request.params;
  return {{"request_id", request.request_id},
          {"prompt", request.prompt},
          {"edge_map_pgm_b64", base64_encode(encode_pgm(request.edge_map))},
          {"guidance", p.guidance},
          {"steps", p.steps},
          {"sampler", p.sampler},
          {"scheduler", p.scheduler},
          {"cfg", p.cfg},
          {"batch", p.batch},
          {"seed", p.seed}};
}

std::vector<RasterImage> generate_response_images(const json& body, const std::string& request_id) {
  if (!body.is_object()) throw GenerationError(request_id, "malformed response: body is not an object");
  if (!body.contains("request_id") || !body.at("request_id").is_string())
    throw GenerationError(request_id, "malformed response: missing request_id");
  if (body.at("request_id").get<std::string>() != request_id)
    throw GenerationError(request_id, "malformed response: answers request '" +
                                          body.at("request_id").get<std::string>() + "'");
  if (!body.contains("images_ppm_b64") || !body.at("images_ppm_b64").is_array())
    throw GenerationError(request_id, "malformed response: missing images_ppm_b64");

  std::vector<RasterImage> images;
  for (const auto& item : body.at("images_ppm_b64")) {
    if (!item.is_string()) throw GenerationError(request_id, "malformed response: image entry is not a string");
    try {
      images.push_back(decode_ppm(base64_decode(item.get<std::string>())));
    } catch (const std::exception& e) {
      throw GenerationError(request_id, std::string("malformed response: ") + e.what());
    }
  }
  return images;
}

json detect_request(const RasterImage& image, const std::vector<std::string>& labels) {
  return {{"image_ppm_b64", base64_encode(encode_ppm(image))}, {"labels", labels}};
}

std::vector<RawDetection> detect_response(const json& body) {
  if (!body.is_object() || !body.contains("detections") || !body.at("detections").is_array())
    throw std::invalid_argument("malformed response: missing detections array");
  std::vector<RawDetection> out;
  for (const auto& d : body.at("detections")) {
    try {
      const auto& box = d.at("bbox");
      if (!box.is_array() || box.size() != 4) throw std::invalid_argument("malformed response: bbox must have 4 numbers");
      out.push_back({d.at("label").get<std::string>(),
                     {box[0].get<double>(), box[1].get<double>(), box[2].get<double>(), box[3].get<double>()},
                     d.at("confidence").get<double>()});
    } catch (const json::exception& e) {
      throw std::invalid_argument(std::string("malformed response: ") + e.what());
    }
  }
  return out;
}

std::string error_message(const std::string& body) {
  const auto doc = json::parse(body, nullptr, false);
  if (doc.is_object() && doc.contains("error") && doc.at("error").is_string()) return doc.at("error").get<std::string>();
  return body;
}

}  // namespace goalimagine::wire
