#pragma once

#include "iclef/explanation.hpp"
#include "iclef/gateway.hpp"
#include "iclef/jsonl.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace iclef {

inline constexpr std::size_t kMaxProfileSentences = 15;

struct AuthorProfile {
  std::string author_id;
  std::set<std::string> attributes;
  /// Every evidence seen per attribute. Not used for scoring.
  std::map<std::string, std::vector<std::string>> evidences;
  std::size_t sentence_count = 0;
  std::size_t failed_sentences = 0;
};

/// Produces the informality explanation of a sentence.
class Explainer {
 public:
  virtual ~Explainer() = default;
  virtual Explanation explain(std::string_view sentence) = 0;
};

/// Recorded explanations, JSONL rows {sentence, explanation}. Unknown
/// sentences throw GatewayError.
class FixtureExplainer : public Explainer {
 public:
  explicit FixtureExplainer(const std::filesystem::path& path);
  explicit FixtureExplainer(std::map<std::string, std::string> table);
  Explanation explain(std::string_view sentence) override;

 private:
  std::map<std::string, std::string> table_;
};

/// Asks a chat model for the informal attributes of each sentence, using
/// the teacher's formality prompt and keeping only the informal section.
class GatewayExplainer : public Explainer {
 public:
  explicit GatewayExplainer(Gateway& gateway);
  Explanation explain(std::string_view sentence) override;

 private:
  Gateway& gateway_;
};

/// Union of attribute sets over the first kMaxProfileSentences sentences.
/// Sentences the explainer cannot handle are skipped and counted.
AuthorProfile build_profile(std::string author_id, const std::vector<std::string>& sentences, Explainer& explainer);

/// |A ∩ B| / |A ∪ B|; two empty profiles score 0.
double similarity(const std::set<std::string>& a, const std::set<std::string>& b);
double similarity(const AuthorProfile& a, const AuthorProfile& b);

/// Probability that a random positive outranks a random negative, ties
/// counting one half. Throws DegenerateLabels without both classes and
/// LengthMismatch on unequal inputs.
double roc_auc(const std::vector<double>& scores, const std::vector<bool>& labels);

struct VerificationPair {
  std::string pair_id;
  std::string text_a;
  std::string text_b;
  bool same_author = false;
};

std::vector<VerificationPair> read_pairs(const std::filesystem::path& path);

struct PairScore {
  std::string pair_id;
  double similarity = 0.0;
  bool same_author = false;
};

struct AuthorshipResult {
  std::vector<PairScore> scores;
  std::optional<double> auc;  // absent when labels are one-class
  std::size_t failed_sentences = 0;
};

AuthorshipResult score_pairs(const std::vector<VerificationPair>& pairs, Explainer& explainer);

std::string pair_scores_csv(const AuthorshipResult& r);
ordered_json to_json(const AuthorshipResult& r);

}  // namespace iclef
