#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dacat/engine.hpp"
#include "dacat/tensor.hpp"
#include "dacat/types.hpp"

namespace dacat::pipeline {

struct VideoSample {
  std::vector<std::vector<double>> obs;  // frames x d_raw
  PhaseTimeline labels;
};

struct Dataset {
  std::vector<VideoSample> videos;

  void validate(const ModelConfig& cfg) const;
  std::size_t total_frames() const;
};

struct StageOptions {
  std::size_t epochs = 1;
  std::size_t segment_len = 64;
  double lr = 1e-4;
  double weight_decay = 0.01;
  bool verbose = false;
};

struct TrainResult {
  ParamSet params;
  std::vector<double> epoch_loss;        // mean per-frame cross-entropy
  double final_train_accuracy = 0.0;
};

// Seeded initialization: weights uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)),
// zero biases, LSTM forget-gate bias 1.
ParamSet init_stage1_params(const ModelConfig& cfg, std::uint64_t seed);

// Full model parameters. The cache encoder and the frame-wise branch both
// start from the (fine-tuned) cache encoder weights; the frame-wise LSTM
// and head continue from the pretraining ones when present.
ParamSet init_dacat_params(const ModelConfig& cfg, const ParamSet& stage1,
                           std::uint64_t seed);

// Stage 1: trains the cache encoder together with an LSTM and linear head
// on per-frame labels. Truncated BPTT over segments of `segment_len`, one
// AdamW step per segment, hidden state carried across segment boundaries
// within a video and reset between videos.
TrainResult train_cache_encoder(const Dataset& data, const ModelConfig& cfg,
                                const StageOptions& opt);

// Stage 2: freezes the cache encoder (its gradients are never allocated)
// and trains the rest of the dual-stream model on the fused logits. The
// cache is rebuilt from frame 1 on every video pass so the read-out always
// sees true history. Training always runs with an unbounded cache.
TrainResult train_dacat(const Dataset& data, const ParamSet& cache_params,
                        const ModelConfig& cfg, const StageOptions& opt);

// Same, but starting from an explicit full parameter set (resuming, or
// ablating a single component of the initialization).
TrainResult train_dacat_params(const Dataset& data, ParamSet initial,
                               const ModelConfig& cfg, const StageOptions& opt);

// Forward + backward over one training segment: grows the video cache,
// carries the LSTM states, accumulates gradients when `grads` is non-null
// and returns the summed per-frame loss (gradients are of the segment
// mean). Building block of train_dacat, exposed so the full-model gradient
// can be checked against finite differences.
double dacat_segment_step(const ParamSet& params, const ModelConfig& cfg,
                          FeatureCache& cache, nn::LSTMState& st_f,
                          nn::LSTMState& st_a,
                          std::span<const std::vector<double>> obs,
                          std::span<const int> labels, GradSet* grads);

// Forward-only pass of the full model over one video, processed in the
// given segment lengths with LSTM state carried across boundaries.
// Segmentation must not change anything; tests rely on bit-equality.
std::vector<std::vector<double>> dacat_forward_logits(
    const ParamSet& params, const ModelConfig& cfg,
    const std::vector<std::vector<double>>& obs,
    const std::vector<std::size_t>& segment_lens);

// Per-frame logits of the stage-1 model (encoder + LSTM + head).
std::vector<std::vector<double>> stage1_forward_logits(
    const ParamSet& params, const ModelConfig& cfg,
    const std::vector<std::vector<double>>& obs);

}  // namespace dacat::pipeline
