#include "iclef/authorship.hpp"

#include "iclef/error.hpp"
#include "iclef/teacher.hpp"
#include "iclef/text.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>

namespace iclef {

FixtureExplainer::FixtureExplainer(const std::filesystem::path& path) {
  for (const auto& row : read_jsonl(path)) {
    table_[collapse_whitespace(row.at("sentence").get<std::string>())] = row.at("explanation").get<std::string>();
  }
}

FixtureExplainer::FixtureExplainer(std::map<std::string, std::string> table) {
  for (auto& [k, v] : table) table_[collapse_whitespace(k)] = std::move(v);
}

Explanation FixtureExplainer::explain(std::string_view sentence) {
  auto it = table_.find(collapse_whitespace(sentence));
  if (it == table_.end()) throw GatewayError("no recorded explanation for: " + std::string(sentence.substr(0, 80)));
  return parse_explanation(it->second, ExplanationKind::Informality);
}

GatewayExplainer::GatewayExplainer(Gateway& gateway) : gateway_(gateway) {}

Explanation GatewayExplainer::explain(std::string_view sentence) {
  TeacherPipeline teacher(gateway_);
  return parse_formality_completion(gateway_.complete(teacher.formality_request(sentence))).informal_attributes;
}

AuthorProfile build_profile(std::string author_id, const std::vector<std::string>& sentences, Explainer& explainer) {
  AuthorProfile p;
  p.author_id = std::move(author_id);
  const auto n = std::min(sentences.size(), kMaxProfileSentences);
  for (std::size_t i = 0; i < n; ++i) {
    ++p.sentence_count;
    try {
      auto e = explainer.explain(sentences[i]);
      for (const auto& a : e.attributes) {
        p.attributes.insert(a.name);
        auto& ev = p.evidences[a.name];
        ev.insert(ev.end(), a.evidences.begin(), a.evidences.end());
      }
    } catch (const ParseError&) {
      ++p.failed_sentences;
    } catch (const QuarantinedRecord&) {
      ++p.failed_sentences;
    } catch (const GatewayError&) {
      ++p.failed_sentences;
    } catch (const TransportError&) {
      ++p.failed_sentences;
    }
  }
  return p;
}

double similarity(const std::set<std::string>& a, const std::set<std::string>& b) {
  std::size_t common = 0;
  for (const auto& x : a) common += b.contains(x);
  const std::size_t uni = a.size() + b.size() - common;
  return uni == 0 ? 0.0 : static_cast<double>(common) / static_cast<double>(uni);
}

double similarity(const AuthorProfile& a, const AuthorProfile& b) { return similarity(a.attributes, b.attributes); }

double roc_auc(const std::vector<double>& scores, const std::vector<bool>& labels) {
  if (scores.size() != labels.size()) throw LengthMismatch("scores and labels differ in length");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Twice the average rank of each tie group, so every sum stays integral.
  std::vector<std::uint64_t> rank2(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const std::uint64_t r2 = static_cast<std::uint64_t>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) rank2[order[k]] = r2;
    i = j;
  }
  std::uint64_t pos = 0, rank2_sum = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i]) {
      ++pos;
      rank2_sum += rank2[i];
    }
  }
  const std::uint64_t neg = n - pos;
  if (pos == 0 || neg == 0) throw DegenerateLabels("ROC AUC needs both positive and negative labels");
  // U statistic times two: sum of doubled positive ranks minus pos*(pos+1).
  const std::uint64_t u2 = rank2_sum - pos * (pos + 1);
  return static_cast<double>(u2) / static_cast<double>(2 * pos * neg);
}

std::vector<VerificationPair> read_pairs(const std::filesystem::path& path) {
  std::vector<VerificationPair> out;
  for (const auto& row : read_jsonl(path)) {
    try {
      VerificationPair p{row.at("pair_id").is_string() ? row.at("pair_id").get<std::string>() : row.at("pair_id").dump(),
                         row.at("text_a").get<std::string>(), row.at("text_b").get<std::string>(),
                         row.at("same_author").get<bool>()};
      if (trim(p.text_a).empty() || trim(p.text_b).empty()) throw SchemaViolation("pair " + p.pair_id + " has an empty text");
      out.push_back(std::move(p));
    } catch (const json::exception& e) {
      throw SchemaViolation(std::string("malformed pair row: ") + e.what());
    }
  }
  return out;
}

AuthorshipResult score_pairs(const std::vector<VerificationPair>& pairs, Explainer& explainer) {
  AuthorshipResult r;
  std::vector<double> scores;
  std::vector<bool> labels;
  for (const auto& p : pairs) {
    auto a = build_profile(p.pair_id + ":a", split_sentences(p.text_a), explainer);
    auto b = build_profile(p.pair_id + ":b", split_sentences(p.text_b), explainer);
    r.failed_sentences += a.failed_sentences + b.failed_sentences;
    double s = similarity(a, b);
    r.scores.push_back({p.pair_id, s, p.same_author});
    scores.push_back(s);
    labels.push_back(p.same_author);
  }
  try {
    r.auc = roc_auc(scores, labels);
  } catch (const DegenerateLabels&) {
    r.auc.reset();
  }
  return r;
}

std::string pair_scores_csv(const AuthorshipResult& r) {
  std::string out = "pair_id,similarity\n";
  for (const auto& s : r.scores) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", s.similarity);
    out += s.pair_id + "," + buf + "\n";
  }
  return out;
}

ordered_json to_json(const AuthorshipResult& r) {
  ordered_json j;
  j["pairs"] = r.scores.size();
  j["auc"] = r.auc ? ordered_json(*r.auc) : ordered_json();
  j["failed_sentences"] = r.failed_sentences;
  return j;
}

}  // namespace iclef
