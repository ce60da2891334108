#include <random>

#include <benchmark/benchmark.h>

#include "fixtures.hpp"
#include "valex/agreement.hpp"

namespace {

std::vector<valex::AgreementItem> random_items(std::size_t videos) {
  std::mt19937_64 rng(5);
  std::vector<valex::AnnotationPair> pairs;
  for (std::size_t i = 0; i < videos; ++i) {
    auto a = fixtures::random_vector(rng);
    auto b = fixtures::random_vector(rng);
    a.set_annotator_id("a");
    b.set_annotator_id("b");
    pairs.push_back({"v" + std::to_string(i), a, b});
  }
  return valex::agreement_items(pairs);
}

void BM_GwetAc1(benchmark::State& state) {
  const auto items = random_items(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(valex::gwet_ac1(items));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(items.size()));
}
BENCHMARK(BM_GwetAc1)->Arg(100)->Arg(10000);

void BM_CohenKappa(benchmark::State& state) {
  const auto items = random_items(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(valex::cohen_kappa(items));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(items.size()));
}
BENCHMARK(BM_CohenKappa)->Arg(100)->Arg(10000);

}  // namespace
