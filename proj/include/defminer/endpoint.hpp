#pragma once

#include <chrono>
#include <string>

#include "json.hpp"

namespace defminer {

/// Environment variable holding the bearer token sent to external endpoints.
inline constexpr const char* kClassifierKeyEnv = "DEFMINER_CLASSIFIER_KEY";

/// POSTs `body` as JSON to an http:// URL and parses the JSON response.
/// Throws EndpointError on connection failure, timeout, non-2xx status or an
/// unparsable body.
nlohmann::json post_json(const std::string& url, const nlohmann::json& body,
                         std::chrono::milliseconds timeout);

}  // namespace defminer
