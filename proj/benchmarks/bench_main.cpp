#include <benchmark/benchmark.h>

#include "sentishape/envsim.hpp"
#include "sentishape/harness.hpp"
#include "sentishape/qnetwork.hpp"
#include "sentishape/replay.hpp"

using namespace sshape;

namespace {

NetworkShape default_shape(int vocab) { return {vocab, 32, 64, 64, 40}; }

IdSequence sequence(int len, int vocab, Rng& rng) {
  IdSequence ids(static_cast<std::size_t>(len));
  for (auto& id : ids) id = 2 + static_cast<int>(uniform_index(rng, static_cast<std::size_t>(vocab - 2)));
  return ids;
}

std::vector<ReplayEntry> batch(int n, int len, int vocab, int actions, Rng& rng) {
  std::vector<ReplayEntry> out;
  for (int i = 0; i < n; ++i) {
    out.push_back({sequence(len, vocab, rng), static_cast<int>(uniform_index(rng, static_cast<std::size_t>(actions))),
                   uniform_real(rng, -1, 1), sequence(len, vocab, rng), i % 7 == 0});
  }
  return out;
}

}  // namespace

static void BM_EncodeState(benchmark::State& state) {
  Rng rng(1);
  const auto params = QParams::random(default_shape(500), 1);
  const auto ids = sequence(static_cast<int>(state.range(0)), 500, rng);
  for (auto _ : state) benchmark::DoNotOptimize(q_values_for(params, ids));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EncodeState)->Arg(16)->Arg(64)->Arg(256);

static void BM_TrainStep(benchmark::State& state) {
  Rng rng(2);
  const auto shape = default_shape(500);
  auto params = QParams::random(shape, 2);
  const auto target = params;
  const auto b = batch(static_cast<int>(state.range(0)), 64, 500, shape.action_count, rng);
  for (auto _ : state) params = train_step(params, target, b, 0.9, 1e-4).params;
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TrainStep)->Arg(1)->Arg(32);

static void BM_NaiveBayesPolarity(benchmark::State& state) {
  const auto model = fit_on_phrase_banks();
  const GameSpec g = generate_game(GameKind::Cooking, 0);
  const std::string obs = reset(g).second;
  for (auto _ : state) benchmark::DoNotOptimize(model.polarity(obs));
}
BENCHMARK(BM_NaiveBayesPolarity);

static void BM_ReplaySample(benchmark::State& state) {
  Rng rng(3);
  ReplayBuffer buf(10000);
  for (const auto& e : batch(10000, 8, 100, 10, rng)) buf.push(e);
  for (auto _ : state) benchmark::DoNotOptimize(buf.sample(32, 0.25, rng));
}
BENCHMARK(BM_ReplaySample);

static void BM_EnvironmentWalkthrough(benchmark::State& state) {
  const GameSpec g = generate_game(GameKind::Cooking, 0);
  for (auto _ : state) {
    auto [s, obs] = reset(g);
    for (const auto& a : g.solution) benchmark::DoNotOptimize(step(s, a));
  }
}
BENCHMARK(BM_EnvironmentWalkthrough);
BENCHMARK_MAIN();
