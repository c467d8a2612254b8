#include "oracles.hpp"

#include <cmath>
#include <sstream>

namespace iclef::test {
namespace {

std::vector<std::string> tokens(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string t; in >> t;) out.push_back(t);
  return out;
}

std::vector<std::string> grams(const std::vector<std::string>& t, std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i + n <= t.size(); ++i) {
    std::string key;
    for (std::size_t k = 0; k < n; ++k) key += t[i + k] + '\x01';
    out.push_back(key);
  }
  return out;
}

}  // namespace

double oracle_corpus_bleu(const std::vector<std::string>& candidates, const std::vector<std::string>& references,
                          double epsilon) {
  double matched[4] = {0, 0, 0, 0};
  double total[4] = {0, 0, 0, 0};
  double c_len = 0, r_len = 0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    auto c = tokens(candidates[i]);
    auto r = tokens(references[i]);
    c_len += static_cast<double>(c.size());
    r_len += static_cast<double>(r.size());
    for (std::size_t n = 1; n <= 4; ++n) {
      auto cg = grams(c, n);
      auto rg = grams(r, n);
      total[n - 1] += static_cast<double>(cg.size());
      // Each reference n-gram can be consumed once.
      std::vector<bool> used(rg.size(), false);
      for (const auto& g : cg) {
        for (std::size_t j = 0; j < rg.size(); ++j) {
          if (!used[j] && rg[j] == g) {
            used[j] = true;
            matched[n - 1] += 1;
            break;
          }
        }
      }
    }
  }
  if (c_len == 0) return 0.0;
  double geo = 1.0;
  for (int n = 0; n < 4; ++n) geo *= std::pow((matched[n] + epsilon) / (total[n] + epsilon), 0.25);
  double bp = c_len > r_len ? 1.0 : std::exp(1.0 - r_len / c_len);
  return 100.0 * bp * geo;
}

double oracle_auc(const std::vector<double>& scores, const std::vector<bool>& labels) {
  double wins = 0;
  double pairs = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!labels[i]) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j]) continue;
      pairs += 1;
      if (scores[i] > scores[j]) wins += 1;
      if (scores[i] == scores[j]) wins += 0.5;
    }
  }
  return wins / pairs;
}

}  // namespace iclef::test
