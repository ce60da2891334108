#include <random>

#include <benchmark/benchmark.h>

#include "fixtures.hpp"
#include "valex/evaluation.hpp"

namespace {

void BM_Evaluate(benchmark::State& state) {
  std::mt19937_64 rng(9);
  valex::GoldSet gold, preds;
  for (std::int64_t i = 0; i < state.range(0); ++i) {
    const auto id = "v" + std::to_string(i);
    gold.emplace(id, fixtures::random_vector(rng));
    preds.emplace(id, fixtures::random_vector(rng));
  }
  const auto space = valex::LabelSpace::full();
  for (auto _ : state) benchmark::DoNotOptimize(valex::evaluate("s", preds, gold, space));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Evaluate)->Arg(100)->Arg(5000);

}  // namespace
