#pragma once

#include <chrono>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dacat/feature_cache.hpp"
#include "dacat/grads.hpp"
#include "dacat/maxr.hpp"
#include "dacat/ops.hpp"
#include "dacat/tensor.hpp"
#include "dacat/types.hpp"

namespace dacat::pipeline {

struct PhasePrediction {
  std::vector<double> fused_logits;
  std::vector<double> fwb_logits;
  std::vector<double> acb_logits;
  int predicted = 0;   // argmax of fused_logits, smallest index on ties
  std::size_t t = 0;   // 1-based frame index
};

// Per-video mutable state. Owned by exactly one logical stream; values are
// freely movable between threads. keys/values mirror the cache with the
// frozen attention projections applied, so per-frame attention never
// re-projects history.
template <class S>
struct StreamStateT {
  BasicFeatureCache<S> cache;
  std::vector<S> keys, values;   // row-major, in lockstep with cache entries
  nn::LSTMStateT<S> fwb_lstm;    // shared LSTM state when fusion == Before
  nn::LSTMStateT<S> acb_lstm;
  std::size_t t = 0;

  StreamStateT(std::size_t d, std::size_t hidden,
               std::optional<std::size_t> capacity)
      : cache(d, capacity), fwb_lstm(hidden), acb_lstm(hidden) {}
};

using StreamState = StreamStateT<double>;

// Parameter names the given configuration reads at inference time.
std::vector<std::string> required_params(const ModelConfig& cfg);

// Verifies presence and shapes of every required parameter.
void validate_params(const ModelConfig& cfg, const ParamSet& params);

// The online dual-stream model: a frame-wise branch and an adaptive
// clip-aware branch over a shared feature cache, stepped frame by frame.
// Instantiated for double (training-grade) and float (inference-only).
template <class S>
class OnlineEngineT {
 public:
  struct RunResult {
    PhaseTimeline timeline;
    std::vector<PhasePrediction> log;
    std::vector<double> frame_ms;  // wall-clock per-frame step cost
  };

  OnlineEngineT(const ModelConfig& cfg, const ParamSet& params);

  StreamStateT<S> begin_stream() const {
    return StreamStateT<S>(cfg_.d, cfg_.hidden, cfg_.cache_capacity);
  }

  // One causal step: encodes the observation, grows the cache, reads out
  // the clip, fuses the branches and returns the prediction at frame t.
  PhasePrediction step(std::span<const S> obs, StreamStateT<S>& state) const;

  RunResult run(const std::vector<std::vector<S>>& video) const;

  const ModelConfig& config() const { return cfg_; }

 private:
  ModelConfig cfg_;
  NamedTensorsT<S> params_;
  // Resolved once; null when the configuration does not use them.
  const TensorT<S>*cache_W_, *cache_b_, *fwb_W_, *fwb_b_;
  const TensorT<S>*Wq_ = nullptr, *Wk_ = nullptr, *Wv_ = nullptr, *Wo_ = nullptr;
  const TensorT<S>*cat_W_ = nullptr, *cat_b_ = nullptr;
  const TensorT<S>*f_Wih_ = nullptr, *f_Whh_ = nullptr, *f_b_ = nullptr;
  const TensorT<S>*f_hW_ = nullptr, *f_hb_ = nullptr;
  const TensorT<S>*a_Wih_ = nullptr, *a_Whh_ = nullptr, *a_b_ = nullptr;
  const TensorT<S>*a_hW_ = nullptr, *a_hb_ = nullptr;

  std::size_t clip_start(std::span<const S> query,
                         const BasicFeatureCache<S>& cache) const;
};

using OnlineEngine = OnlineEngineT<double>;
using OnlineEngineF = OnlineEngineT<float>;

extern template class OnlineEngineT<double>;
extern template class OnlineEngineT<float>;

}  // namespace dacat::pipeline
