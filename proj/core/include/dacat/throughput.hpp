#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dacat/tensor.hpp"
#include "dacat/types.hpp"

namespace dacat::eval {

enum class Precision { F64, F32 };

struct ThroughputRow {
  std::size_t length = 0;
  std::size_t d = 0;
  double mean_ms = 0.0;
  double p95_ms = 0.0;
  double fps = 0.0;
};

// Streams `length` random frames through a fresh engine after a short
// warm-up, timing every step; mean/p95 cover the whole stream, i.e. cache
// sizes 1..length. Single-threaded by contract.
std::vector<ThroughputRow> bench_throughput(const ParamSet& params,
                                            const ModelConfig& cfg,
                                            const std::vector<std::size_t>& lengths,
                                            std::uint64_t seed = 0,
                                            Precision precision = Precision::F64);

// Steady-state per-frame cost: fills the cache to `cache_len`, then times
// `probe_frames` further steps at that size.
struct StepCost {
  double mean_ms = 0.0;
  double p95_ms = 0.0;
};

StepCost measure_step_cost(const ParamSet& params, const ModelConfig& cfg,
                           std::size_t cache_len, std::size_t probe_frames,
                           std::uint64_t seed = 0,
                           Precision precision = Precision::F64);

// "length,d,mean_ms,p95_ms,fps" with one row per measurement.
std::string throughput_csv(const std::vector<ThroughputRow>& rows);

// Least-squares slope of log(cost) against log(t); the growth exponent.
double loglog_slope(const std::vector<double>& t, const std::vector<double>& cost);

}  // namespace dacat::eval
