#pragma once

// Separated from gateway.hpp so only live-capable binaries pay for httplib.

#include <cstdlib>
#include <string>

#include <httplib.h>

#include "emdm/errors.hpp"
#include "emdm/gateway.hpp"

namespace emdm {

// Chat-completions over HTTP. The bearer token comes from EMDM_API_KEY; the
// per-model base URL from the endpoint map.
class HttpTransport : public Transport {
 public:
  HttpResult post_chat(const Endpoint& endpoint, const std::string& body) override {
    auto [origin, prefix] = split_origin(endpoint.base_url);
    httplib::Client client(origin);
    client.set_connection_timeout(30, 0);
    client.set_read_timeout(120, 0);
    httplib::Headers headers;
    if (const char* key = std::getenv("EMDM_API_KEY"))
      headers.emplace("Authorization", std::string("Bearer ") + key);
    auto res = client.Post(prefix + "/chat/completions", headers, body, "application/json");
    if (!res) return {-1, httplib::to_string(res.error())};
    return {res->status, res->body};
  }

 private:
  // "https://host:443/v1" -> ("https://host:443", "/v1")
  static std::pair<std::string, std::string> split_origin(const std::string& base_url) {
    size_t scheme = base_url.find("://");
    size_t path = scheme == std::string::npos ? base_url.find('/')
                                              : base_url.find('/', scheme + 3);
    if (path == std::string::npos) return {base_url, ""};
    return {base_url.substr(0, path), base_url.substr(path)};
  }
};

}  // namespace emdm
