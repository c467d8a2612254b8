#include "iclef/explanation.hpp"

#include <benchmark/benchmark.h>

using namespace iclef;

namespace {

const char* kText =
    R"(informal greeting ("hopefully"), slang ("screwed", "gonna"), contraction ("aren't"), use of verb "to be" ("is"))";

void BM_Parse(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(parse_explanation(kText, ExplanationKind::Informality));
}
BENCHMARK(BM_Parse);

void BM_Render(benchmark::State& state) {
  auto e = parse_explanation(kText, ExplanationKind::Informality);
  for (auto _ : state) benchmark::DoNotOptimize(render_explanation(e));
}
BENCHMARK(BM_Render);

void BM_Trustworthiness(benchmark::State& state) {
  auto e = parse_explanation(kText, ExplanationKind::Informality);
  std::string sentence = "hopefully you aren't gonna be screwed, it is fine";
  for (auto _ : state) benchmark::DoNotOptimize(trustworthiness(e, sentence));
}
BENCHMARK(BM_Trustworthiness);

}  // namespace
