#include <benchmark/benchmark.h>

#include "fixtures.hpp"
#include "valex/classifier.hpp"
#include "valex/label_space.hpp"

namespace {

void BM_Encode(benchmark::State& state) {
  const valex::BagOfTokensEncoder encoder;
  for (auto _ : state) benchmark::DoNotOptimize(encoder.encode(fixtures::kTennisScript, 512));
}
BENCHMARK(BM_Encode);

void BM_TrainHead(benchmark::State& state) {
  const valex::BagOfTokensEncoder encoder;
  const auto corpus = fixtures::make_separable_corpus(static_cast<std::size_t>(state.range(0)), 25, 3, encoder);
  const auto split = valex::split_corpus(corpus.manifest, {0.7, 0.1, 0.2}, valex::StratifyKey::Influencer, 13);
  valex::GoldSet train_gold;
  for (const auto& id : split.train) train_gold.emplace(id, corpus.gold.at(id));
  const auto space = valex::select_labels(train_gold, 1);
  valex::TrainConfig cfg;
  cfg.epochs = 5;
  for (auto _ : state) benchmark::DoNotOptimize(valex::train(split, corpus.scripts, corpus.gold, space, cfg, encoder));
}
BENCHMARK(BM_TrainHead)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_DomainFinetuneStep(benchmark::State& state) {
  valex::BagOfTokensEncoder encoder;
  const std::vector<std::string> texts(8, fixtures::kTennisScript);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(encoder.masked_token_step(texts, 0.5, ++seed));
}
BENCHMARK(BM_DomainFinetuneStep)->Unit(benchmark::kMillisecond);

}  // namespace
