#include "iclef/error.hpp"
#include "iclef/gateway.hpp"

#include <httplib.h>

#include <cstdlib>

namespace iclef {
namespace {

// "https://host:port/v1" -> {"https://host:port", "/v1"}
std::pair<std::string, std::string> split_base_url(const std::string& base) {
  auto scheme_end = base.find("://");
  auto host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
  auto path_start = base.find('/', host_start);
  if (path_start == std::string::npos) return {base, ""};
  auto path = base.substr(path_start);
  while (!path.empty() && path.back() == '/') path.pop_back();
  return {base.substr(0, path_start), path};
}

std::chrono::milliseconds retry_after(const httplib::Result& res) {
  if (res->has_header("retry-after-ms")) {
    return std::chrono::milliseconds(std::atoll(res->get_header_value("retry-after-ms").c_str()));
  }
  if (res->has_header("Retry-After")) {
    double secs = std::atof(res->get_header_value("Retry-After").c_str());
    if (secs > 0) return std::chrono::milliseconds(static_cast<long long>(secs * 1000));
  }
  return std::chrono::milliseconds(0);
}

}  // namespace

HttpChatTransport::HttpChatTransport(std::string base_url, std::string api_key, std::chrono::seconds timeout)
    : api_key_(std::move(api_key)), timeout_(timeout) {
  std::tie(origin_, path_prefix_) = split_base_url(base_url);
}

std::shared_ptr<HttpChatTransport> HttpChatTransport::from_environment() {
  const char* base = std::getenv("ICLEF_API_BASE");
  if (!base || !*base) throw UsageError("ICLEF_API_BASE is not set");
  const char* key = std::getenv("ICLEF_API_KEY");
  return std::make_shared<HttpChatTransport>(base, key ? key : "");
}

std::string HttpChatTransport::send(const ChatRequest& req) {
  httplib::Client client(origin_);
  client.set_connection_timeout(std::chrono::seconds(10));
  client.set_read_timeout(timeout_);
  client.set_write_timeout(timeout_);
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

  auto res = client.Post(path_prefix_ + "/chat/completions", headers, req.to_json().dump(), "application/json");
  if (!res) throw TransportError("chat endpoint unreachable: " + httplib::to_string(res.error()));
  if (res->status == 429) throw RateLimited("chat endpoint rate limited", retry_after(res));
  if (res->status == 408 || res->status >= 500) {
    throw TransportError("chat endpoint returned HTTP " + std::to_string(res->status));
  }
  if (res->status != 200) {
    throw GatewayError("chat endpoint returned HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200));
  }
  auto body = json::parse(res->body, nullptr, false);
  if (body.is_discarded()) throw GatewayError("chat endpoint returned invalid JSON");
  try {
    return body.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    throw GatewayError(std::string("unexpected chat completion shape: ") + e.what());
  }
}

}  // namespace iclef
