#pragma once

#include "iclef/jsonl.hpp"

#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace iclef {

enum class Metric { Mis, Formality, Neutrality };

std::string_view metric_name(Metric m);  // "mis" | "formality" | "neutrality"
Metric parse_metric(std::string_view name);

/// A single text, or an ordered pair for MIS.
struct ScoreItem {
  std::string text;
  std::optional<std::string> text_b;
};

/// Body of POST /score: {"metric": ..., "items": [{"text"} | {"text_a", "text_b"}]}.
json score_request_json(Metric metric, const std::vector<ScoreItem>& items);

/// Validates a request body against the protocol: known metric, pairs for
/// mis, single texts otherwise. Throws SchemaViolation.
std::pair<Metric, std::vector<ScoreItem>> parse_score_request(const json& body);

/// Extracts {"scores": [...]}; throws MalformedResponse unless there are
/// exactly `expected` numbers, each within [0, 100].
std::vector<double> parse_score_response(const json& body, std::size_t expected);

/// Scores in [0, 100], one per item.
class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual std::vector<double> score(Metric metric, const std::vector<ScoreItem>& items) = 0;
  virtual bool healthy() { return true; }
};

/// Deterministic offline scorer: each score is derived from a SHA-256 of
/// the metric and text. Pair scores hash the texts in sorted order, so
/// score(a, b) == score(b, a).
class StubScorer : public Scorer {
 public:
  std::vector<double> score(Metric metric, const std::vector<ScoreItem>& items) override;
  static double score_one(Metric metric, const ScoreItem& item);
};

/// Client of the scorer wire protocol. Large requests are sent in batches.
class HttpScorer : public Scorer {
 public:
  explicit HttpScorer(std::string base_url, std::chrono::seconds timeout = std::chrono::seconds(60),
                      std::size_t batch_size = 64);
  std::vector<double> score(Metric metric, const std::vector<ScoreItem>& items) override;
  bool healthy() override;

 private:
  std::string origin_;
  std::string path_prefix_;
  std::chrono::seconds timeout_;
  std::size_t batch_size_;
};

}  // namespace iclef
