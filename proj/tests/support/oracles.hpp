#pragma once

// Straightforward reference implementations used to cross-check the
// optimized library code. They favour obviousness over speed.

#include <cstddef>
#include <string>
#include <vector>

namespace iclef::test {

/// Corpus BLEU-4 with add-epsilon smoothing, computed from scratch with
/// string n-gram keys and a linear-scan clip count.
double oracle_corpus_bleu(const std::vector<std::string>& candidates, const std::vector<std::string>& references,
                          double epsilon = 0.1);

/// Fraction of (positive, negative) pairs ordered correctly, ties half.
double oracle_auc(const std::vector<double>& scores, const std::vector<bool>& labels);

}  // namespace iclef::test
