#include "iclef/authorship.hpp"
#include "iclef/bleu.hpp"
#include "iclef/rng.hpp"

#include <benchmark/benchmark.h>

using namespace iclef;

namespace {

std::vector<std::string> sentences(std::size_t n, std::uint64_t seed) {
  const std::vector<std::string> words = {"slang", "(\"u\"),", "textese", "(\"r\",", "\"gonna\"),", "contraction"};
  Rng rng(seed);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::string s;
    for (std::size_t w = 0; w < 12; ++w) s += words[rng.uniform_index(words.size())] + " ";
    out.push_back(s);
  }
  return out;
}

void BM_CorpusBleu(benchmark::State& state) {
  auto cands = sentences(static_cast<std::size_t>(state.range(0)), 1);
  auto refs = sentences(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(corpus_bleu(cands, refs));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CorpusBleu)->Arg(100)->Arg(2000);

void BM_RocAuc(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(3);
  std::vector<double> scores(n);
  std::vector<bool> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    scores[i] = static_cast<double>(rng.uniform_index(1000)) / 999.0;
    labels[i] = i % 2 == 0;
  }
  for (auto _ : state) benchmark::DoNotOptimize(roc_auc(scores, labels));
}
BENCHMARK(BM_RocAuc)->Arg(200)->Arg(20000);

}  // namespace
