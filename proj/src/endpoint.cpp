#include "defminer/endpoint.hpp"

#include <cstdlib>

#include "defminer/error.hpp"
#include "httplib.h"

namespace defminer {

namespace {

struct ParsedUrl {
  std::string scheme_host_port;
  std::string path;
};

ParsedUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw EndpointError("endpoint URL lacks a scheme: " + url);
  if (url.compare(0, scheme_end, "http") != 0) {
    throw EndpointError("only http:// endpoints are supported: " + url);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

nlohmann::json post_json(const std::string& url, const nlohmann::json& body,
                         std::chrono::milliseconds timeout) {
  const ParsedUrl parsed = split_url(url);
  httplib::Client client(parsed.scheme_host_port);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);

  httplib::Headers headers;
  if (const char* key = std::getenv(kClassifierKeyEnv); key != nullptr && *key != '\0') {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  auto res = client.Post(parsed.path, headers, body.dump(), "application/json");
  if (!res) {
    throw EndpointError("request to " + url + " failed: " + httplib::to_string(res.error()));
  }
  if (res->status < 200 || res->status >= 300) {
    throw EndpointError("endpoint " + url + " returned HTTP " + std::to_string(res->status));
  }
  try {
    return nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception& e) {
    throw EndpointError("endpoint " + url + " returned an unparsable body: " + e.what());
  }
}

}  // namespace defminer
