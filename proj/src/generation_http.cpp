#include "goalimagine/generation.hpp"
#include "goalimagine/wire.hpp"

#include <httplib.h>

namespace goalimagine {

HttpGenerationBackend::HttpGenerationBackend(std::string base_url, std::chrono::seconds timeout)
    : base_url_(std::move(base_url)), timeout_(timeout) {}

std::vector<CandidateImage> HttpGenerationBackend::generate(const GenRequest& request) {
  httplib::Client client(base_url_);
  if (!client.is_valid()) throw GenerationError(request.request_id, "invalid backend url '" + base_url_ + "'");
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  client.set_write_timeout(timeout_);

  const auto res = client.Post("/v1/generate", wire::generate_request(request).dump(), "application/json");
  if (!res) {
    const auto err = res.error();
    const std::string what = err == httplib::Error::Read || err == httplib::Error::ConnectionTimeout
                                 ? "backend timeout"
                                 : "backend unreachable (" + httplib::to_string(err) + ")";
    throw GenerationError(request.request_id, what);
  }
  if (res->status != 200) {
    throw GenerationError(request.request_id,
                          "backend error " + std::to_string(res->status) + ": " + wire::error_message(res->body));
  }

  const auto body = nlohmann::json::parse(res->body, nullptr, false);
  if (body.is_discarded()) throw GenerationError(request.request_id, "malformed response: invalid JSON");
  auto images = wire::generate_response_images(body, request.request_id);

  std::vector<CandidateImage> out;
  out.reserve(images.size());
  for (std::size_t i = 0; i < images.size(); ++i) {
    out.push_back({std::move(images[i]), static_cast<int>(i), request.request_id, name()});
  }
  return out;
}

}  // namespace goalimagine
