#pragma once

#include <string>
#include <string_view>

namespace goalimagine {

/// Standard alphabet with '=' padding.
std::string base64_encode(std::string_view bytes);

/// Throws std::invalid_argument on characters outside the alphabet or bad padding.
std::string base64_decode(std::string_view text);

}  // namespace goalimagine
