#include "iclef/scorer.hpp"

#include "iclef/digest.hpp"
#include "iclef/error.hpp"

#include <httplib.h>

#include <algorithm>

namespace iclef {

std::string_view metric_name(Metric m) {
  switch (m) {
    case Metric::Mis: return "mis";
    case Metric::Formality: return "formality";
    case Metric::Neutrality: return "neutrality";
  }
  return "mis";
}

Metric parse_metric(std::string_view name) {
  if (name == "mis") return Metric::Mis;
  if (name == "formality") return Metric::Formality;
  if (name == "neutrality") return Metric::Neutrality;
  throw SchemaViolation("unknown metric '" + std::string(name) + "'");
}

json score_request_json(Metric metric, const std::vector<ScoreItem>& items) {
  json arr = json::array();
  for (const auto& it : items) {
    if (it.text_b) {
      arr.push_back({{"text_a", it.text}, {"text_b", *it.text_b}});
    } else {
      arr.push_back({{"text", it.text}});
    }
  }
  return {{"metric", metric_name(metric)}, {"items", std::move(arr)}};
}

std::pair<Metric, std::vector<ScoreItem>> parse_score_request(const json& body) {
  if (!body.is_object() || !body.contains("metric") || !body["metric"].is_string()) {
    throw SchemaViolation("score request needs a string 'metric'");
  }
  auto metric = parse_metric(body["metric"].get<std::string>());
  if (!body.contains("items") || !body["items"].is_array()) throw SchemaViolation("score request needs an 'items' array");
  std::vector<ScoreItem> items;
  for (const auto& it : body["items"]) {
    const bool pair = it.is_object() && it.contains("text_a") && it.contains("text_b");
    const bool single = it.is_object() && it.contains("text");
    if (metric == Metric::Mis) {
      if (!pair || !it["text_a"].is_string() || !it["text_b"].is_string()) {
        throw SchemaViolation("mis items must be {text_a, text_b}");
      }
      items.push_back({it["text_a"].get<std::string>(), it["text_b"].get<std::string>()});
    } else {
      if (!single || !it["text"].is_string()) throw SchemaViolation("single-text metric items must be {text}");
      items.push_back({it["text"].get<std::string>(), std::nullopt});
    }
  }
  return {metric, std::move(items)};
}

std::vector<double> parse_score_response(const json& body, std::size_t expected) {
  if (!body.is_object() || !body.contains("scores") || !body["scores"].is_array()) {
    throw MalformedResponse("scorer response has no 'scores' array");
  }
  const auto& arr = body["scores"];
  if (arr.size() != expected) {
    throw MalformedResponse("scorer returned " + std::to_string(arr.size()) + " scores for " +
                            std::to_string(expected) + " items");
  }
  std::vector<double> out;
  out.reserve(expected);
  for (const auto& v : arr) {
    if (!v.is_number()) throw MalformedResponse("non-numeric score");
    double d = v.get<double>();
    if (!(d >= 0.0 && d <= 100.0)) throw MalformedResponse("score outside [0, 100]");
    out.push_back(d);
  }
  return out;
}

double StubScorer::score_one(Metric metric, const ScoreItem& item) {
  std::string key(metric_name(metric));
  key += '\x1f';
  if (item.text_b) {
    const auto& [lo, hi] = std::minmax(item.text, *item.text_b);
    key += lo;
    key += '\x1e';
    key += hi;
  } else {
    key += item.text;
  }
  return static_cast<double>(sha256_u64(key) % 10001) / 100.0;
}

std::vector<double> StubScorer::score(Metric metric, const std::vector<ScoreItem>& items) {
  std::vector<double> out;
  out.reserve(items.size());
  for (const auto& it : items) out.push_back(score_one(metric, it));
  return out;
}

HttpScorer::HttpScorer(std::string base_url, std::chrono::seconds timeout, std::size_t batch_size)
    : timeout_(timeout), batch_size_(std::max<std::size_t>(1, batch_size)) {
  auto scheme_end = base_url.find("://");
  auto host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
  auto path_start = base_url.find('/', host_start);
  if (path_start == std::string::npos) {
    origin_ = base_url;
  } else {
    origin_ = base_url.substr(0, path_start);
    path_prefix_ = base_url.substr(path_start);
    while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
  }
}

std::vector<double> HttpScorer::score(Metric metric, const std::vector<ScoreItem>& items) {
  httplib::Client client(origin_);
  client.set_connection_timeout(std::chrono::seconds(5));
  client.set_read_timeout(timeout_);
  client.set_write_timeout(timeout_);
  std::vector<double> out;
  out.reserve(items.size());
  for (std::size_t start = 0; start < items.size(); start += batch_size_) {
    std::vector<ScoreItem> batch(items.begin() + static_cast<std::ptrdiff_t>(start),
                                 items.begin() + static_cast<std::ptrdiff_t>(std::min(items.size(), start + batch_size_)));
    auto res = client.Post(path_prefix_ + "/score", score_request_json(metric, batch).dump(), "application/json");
    if (!res) throw ScorerUnavailable("scorer unreachable at " + origin_ + ": " + httplib::to_string(res.error()));
    if (res->status >= 500) throw ScorerUnavailable("scorer returned HTTP " + std::to_string(res->status));
    if (res->status != 200) {
      throw MalformedResponse("scorer returned HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200));
    }
    auto body = json::parse(res->body, nullptr, false);
    if (body.is_discarded()) throw MalformedResponse("scorer returned invalid JSON");
    auto scores = parse_score_response(body, batch.size());
    out.insert(out.end(), scores.begin(), scores.end());
  }
  return out;
}

bool HttpScorer::healthy() {
  httplib::Client client(origin_);
  client.set_connection_timeout(std::chrono::seconds(2));
  client.set_read_timeout(std::chrono::seconds(5));
  auto res = client.Get(path_prefix_ + "/health");
  return res && res->status == 200;
}

}  // namespace iclef
