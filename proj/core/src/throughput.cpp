#include "dacat/throughput.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "dacat/engine.hpp"
#include "dacat/rng.hpp"

namespace dacat::eval {

namespace {

template <class S>
std::vector<S> random_obs(std::size_t d_raw, Rng& rng) {
  std::vector<S> x(d_raw);
  for (auto& v : x) v = static_cast<S>(rng.normal());
  return x;
}

double percentile95(std::vector<double> ms) {
  std::sort(ms.begin(), ms.end());
  const std::size_t idx =
      ms.empty() ? 0 : std::min(ms.size() - 1, static_cast<std::size_t>(
                                                   std::ceil(0.95 * ms.size())) - 1);
  return ms.empty() ? 0.0 : ms[idx];
}

template <class S>
ThroughputRow bench_one(const pipeline::OnlineEngineT<S>& engine,
                        std::size_t length, Rng& rng) {
  // Warm-up stream so allocation and code paths are hot.
  {
    auto st = engine.begin_stream();
    for (int i = 0; i < 32; ++i) {
      auto x = random_obs<S>(engine.config().d_raw, rng);
      engine.step(std::span<const S>(x), st);
    }
  }
  auto st = engine.begin_stream();
  std::vector<double> ms;
  ms.reserve(length);
  for (std::size_t i = 0; i < length; ++i) {
    auto x = random_obs<S>(engine.config().d_raw, rng);
    const auto t0 = std::chrono::steady_clock::now();
    engine.step(std::span<const S>(x), st);
    const auto t1 = std::chrono::steady_clock::now();
    ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  ThroughputRow row;
  row.length = length;
  row.d = engine.config().d;
  double sum = 0;
  for (double v : ms) sum += v;
  row.mean_ms = sum / ms.size();
  row.p95_ms = percentile95(std::move(ms));
  row.fps = row.mean_ms > 0 ? 1000.0 / row.mean_ms : 0.0;
  return row;
}

template <class S>
StepCost probe_cost(const pipeline::OnlineEngineT<S>& engine,
                    std::size_t cache_len, std::size_t probe_frames, Rng& rng) {
  auto st = engine.begin_stream();
  for (std::size_t i = 0; i < cache_len; ++i) {
    auto x = random_obs<S>(engine.config().d_raw, rng);
    engine.step(std::span<const S>(x), st);
  }
  std::vector<double> ms;
  ms.reserve(probe_frames);
  for (std::size_t i = 0; i < probe_frames; ++i) {
    auto x = random_obs<S>(engine.config().d_raw, rng);
    const auto t0 = std::chrono::steady_clock::now();
    engine.step(std::span<const S>(x), st);
    const auto t1 = std::chrono::steady_clock::now();
    ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  StepCost cost;
  double sum = 0;
  for (double v : ms) sum += v;
  cost.mean_ms = sum / ms.size();
  cost.p95_ms = percentile95(std::move(ms));
  return cost;
}

}  // namespace

std::vector<ThroughputRow> bench_throughput(const ParamSet& params,
                                            const ModelConfig& cfg,
                                            const std::vector<std::size_t>& lengths,
                                            std::uint64_t seed,
                                            Precision precision) {
  Rng rng(derive_seed(seed, 0xBE7C));
  std::vector<ThroughputRow> rows;
  if (precision == Precision::F32) {
    pipeline::OnlineEngineF engine(cfg, params);
    for (std::size_t len : lengths) rows.push_back(bench_one<float>(engine, len, rng));
  } else {
    pipeline::OnlineEngine engine(cfg, params);
    for (std::size_t len : lengths) rows.push_back(bench_one<double>(engine, len, rng));
  }
  return rows;
}

StepCost measure_step_cost(const ParamSet& params, const ModelConfig& cfg,
                           std::size_t cache_len, std::size_t probe_frames,
                           std::uint64_t seed, Precision precision) {
  if (probe_frames == 0) throw std::invalid_argument("measure_step_cost: no probes");
  Rng rng(derive_seed(seed, 0xBE7D));
  if (precision == Precision::F32) {
    pipeline::OnlineEngineF engine(cfg, params);
    return probe_cost<float>(engine, cache_len, probe_frames, rng);
  }
  pipeline::OnlineEngine engine(cfg, params);
  return probe_cost<double>(engine, cache_len, probe_frames, rng);
}

std::string throughput_csv(const std::vector<ThroughputRow>& rows) {
  std::string out = "length,d,mean_ms,p95_ms,fps\n";
  char buf[128];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%zu,%zu,%.6f,%.6f,%.3f\n", r.length, r.d,
                  r.mean_ms, r.p95_ms, r.fps);
    out += buf;
  }
  return out;
}

double loglog_slope(const std::vector<double>& t, const std::vector<double>& cost) {
  if (t.size() != cost.size() || t.size() < 2)
    throw std::invalid_argument("loglog_slope: need >= 2 matching points");
  const std::size_t n = t.size();
  double mx = 0, my = 0;
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    lx[i] = std::log(t[i]);
    ly[i] = std::log(cost[i]);
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double num = 0, den = 0;
  for (std::size_t i = 0; i < n; ++i) {
    num += (lx[i] - mx) * (ly[i] - my);
    den += (lx[i] - mx) * (lx[i] - mx);
  }
  return num / den;
}

}  // namespace dacat::eval
