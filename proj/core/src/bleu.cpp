#include "iclef/bleu.hpp"

#include "iclef/error.hpp"

#include <cctype>
#include <cmath>
#include <map>
#include <set>

namespace iclef {

BleuStats& BleuStats::operator+=(const BleuStats& o) {
  for (int n = 0; n < kBleuOrder; ++n) {
    matches[n] += o.matches[n];
    totals[n] += o.totals[n];
  }
  candidate_length += o.candidate_length;
  reference_length += o.reference_length;
  return *this;
}

std::vector<std::string> whitespace_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) out.emplace_back(text.substr(start, i - start));
  }
  return out;
}

namespace {

using Ngram = std::vector<std::string_view>;

std::map<Ngram, std::size_t> ngram_counts(const std::vector<std::string>& tokens, std::size_t n) {
  std::map<Ngram, std::size_t> counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    Ngram g(tokens.begin() + static_cast<std::ptrdiff_t>(i), tokens.begin() + static_cast<std::ptrdiff_t>(i + n));
    ++counts[std::move(g)];
  }
  return counts;
}

}  // namespace

BleuStats bleu_stats(const std::vector<std::string>& candidate, const std::vector<std::string>& reference) {
  BleuStats s;
  s.candidate_length = candidate.size();
  s.reference_length = reference.size();
  for (int n = 1; n <= kBleuOrder; ++n) {
    auto cand = ngram_counts(candidate, static_cast<std::size_t>(n));
    auto ref = ngram_counts(reference, static_cast<std::size_t>(n));
    std::size_t total = 0, matched = 0;
    for (const auto& [g, c] : cand) {
      total += c;
      if (auto it = ref.find(g); it != ref.end()) matched += std::min(c, it->second);
    }
    s.matches[n - 1] = matched;
    s.totals[n - 1] = total;
  }
  return s;
}

double bleu_score(const BleuStats& s, double epsilon) {
  if (s.candidate_length == 0) return 0.0;
  double log_sum = 0.0;
  for (int n = 0; n < kBleuOrder; ++n) {
    double p = (static_cast<double>(s.matches[n]) + epsilon) / (static_cast<double>(s.totals[n]) + epsilon);
    log_sum += std::log(p);
  }
  double c = static_cast<double>(s.candidate_length);
  double r = static_cast<double>(s.reference_length);
  double log_bp = c > r ? 0.0 : 1.0 - r / c;
  return 100.0 * std::exp(log_bp + log_sum / kBleuOrder);
}

double corpus_bleu(const std::vector<std::string>& candidates, const std::vector<std::string>& references,
                   double epsilon) {
  if (candidates.size() != references.size()) {
    throw LengthMismatch(std::to_string(candidates.size()) + " candidates vs " + std::to_string(references.size()) +
                         " references");
  }
  BleuStats total;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    total += bleu_stats(whitespace_tokens(candidates[i]), whitespace_tokens(references[i]));
  }
  return bleu_score(total, epsilon);
}

double attrs_bleu(const std::vector<std::string>& candidates, const std::vector<std::string>& references) {
  return corpus_bleu(candidates, references);
}

double bias_f1(const std::vector<std::string>& predictions, const std::vector<std::string>& golds) {
  if (predictions.size() != golds.size()) {
    throw LengthMismatch(std::to_string(predictions.size()) + " predictions vs " + std::to_string(golds.size()) +
                         " golds");
  }
  if (golds.empty()) return 0.0;
  std::set<std::string> classes(golds.begin(), golds.end());
  double sum = 0.0;
  for (const auto& c : classes) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < golds.size(); ++i) {
      bool p = predictions[i] == c;
      bool g = golds[i] == c;
      tp += p && g;
      fp += p && !g;
      fn += !p && g;
    }
    sum += 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
  }
  return 100.0 * sum / static_cast<double>(classes.size());
}

}  // namespace iclef
