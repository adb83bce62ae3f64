// Whole online step at increasing cache sizes, the throughput-critical
// path: encoder, response scan, suffix sum, attention over cached
// projections, both LSTMs and heads.

#include <benchmark/benchmark.h>

#include "dacat/engine.hpp"
#include "dacat/rng.hpp"
#include "dacat/train.hpp"

using namespace dacat;

namespace {

template <class S>
void BM_OnlineStep(benchmark::State& state) {
  const std::size_t fill = static_cast<std::size_t>(state.range(0));
  ModelConfig cfg;
  cfg.d = 768;
  cfg.d_raw = 768;
  cfg.K = 7;
  cfg.hidden = 128;
  cfg.seed = 7;
  auto params =
      pipeline::init_dacat_params(cfg, pipeline::init_stage1_params(cfg, 7), 7);
  pipeline::OnlineEngineT<S> engine(cfg, params);
  auto st = engine.begin_stream();
  Rng rng(8);
  std::vector<S> x(cfg.d_raw);
  for (std::size_t i = 0; i < fill; ++i) {
    for (auto& v : x) v = static_cast<S>(rng.normal());
    engine.step(std::span<const S>(x), st);
  }
  for (auto _ : state) {
    for (auto& v : x) v = static_cast<S>(rng.normal());
    auto pred = engine.step(std::span<const S>(x), st);
    benchmark::DoNotOptimize(pred.predicted);
  }
}

}  // namespace

BENCHMARK(BM_OnlineStep<double>)->Arg(100)->Arg(1000)->Arg(10000)
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OnlineStep<float>)->Arg(10000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
