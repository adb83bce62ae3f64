#include <benchmark/benchmark.h>

#include "dacat/maxr.hpp"
#include "dacat/rng.hpp"

using namespace dacat;

namespace {

template <class S>
BasicFeatureCache<S> filled_cache(std::size_t t, std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  BasicFeatureCache<S> cache(d);
  std::vector<S> f(d);
  for (std::size_t i = 0; i < t; ++i) {
    for (auto& x : f) x = static_cast<S>(rng.normal());
    cache.append(f);
  }
  return cache;
}

template <class S>
void BM_FrameResponse(benchmark::State& state) {
  const std::size_t t = static_cast<std::size_t>(state.range(0));
  const std::size_t d = static_cast<std::size_t>(state.range(1));
  auto cache = filled_cache<S>(t, d, 1);
  Rng rng(2);
  std::vector<S> q(d);
  for (auto& x : q) x = static_cast<S>(rng.normal());
  for (auto _ : state) {
    auto s = maxr::frame_response<S>(q, cache);
    benchmark::DoNotOptimize(s.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(t) *
                          static_cast<std::int64_t>(d));
}

void BM_AdaptiveReadout(benchmark::State& state) {
  const std::size_t t = static_cast<std::size_t>(state.range(0));
  const std::size_t d = 768;
  auto cache = filled_cache<double>(t, d, 3);
  Rng rng(4);
  std::vector<double> q(d);
  for (auto& x : q) x = rng.normal();
  for (auto _ : state) {
    auto [clip, sel] = maxr::read_adaptive<double>(q, cache);
    benchmark::DoNotOptimize(sel.start_index);
    benchmark::DoNotOptimize(clip.data());
  }
}

}  // namespace

BENCHMARK(BM_FrameResponse<double>)
    ->Args({1000, 768})
    ->Args({10000, 768})
    ->Args({10000, 1536});
BENCHMARK(BM_FrameResponse<float>)->Args({10000, 768});
BENCHMARK(BM_AdaptiveReadout)->Arg(1000)->Arg(10000);
