#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace iclef {

inline constexpr int kBleuOrder = 4;
inline constexpr double kBleuEpsilon = 0.1;

/// Clipped n-gram statistics of one candidate/reference pair, summable over
/// a corpus.
struct BleuStats {
  std::array<std::size_t, kBleuOrder> matches{};
  std::array<std::size_t, kBleuOrder> totals{};
  std::size_t candidate_length = 0;
  std::size_t reference_length = 0;

  BleuStats& operator+=(const BleuStats& o);
};

std::vector<std::string> whitespace_tokens(std::string_view text);

BleuStats bleu_stats(const std::vector<std::string>& candidate, const std::vector<std::string>& reference);

/// BLEU-4 in [0, 100] from summed statistics: geometric mean of
/// (m_n + eps) / (t_n + eps) times the brevity penalty. An empty candidate
/// side scores 0.
double bleu_score(const BleuStats& stats, double epsilon = kBleuEpsilon);

/// Corpus BLEU over whitespace-tokenized texts. Throws LengthMismatch when
/// the lists differ in length.
double corpus_bleu(const std::vector<std::string>& candidates, const std::vector<std::string>& references,
                   double epsilon = kBleuEpsilon);

/// Corpus BLEU over canonical explanation renderings.
double attrs_bleu(const std::vector<std::string>& candidates, const std::vector<std::string>& references);

/// Macro F1 in [0, 100] over the classes that occur in `golds`. Throws
/// LengthMismatch.
double bias_f1(const std::vector<std::string>& predictions, const std::vector<std::string>& golds);

}  // namespace iclef
