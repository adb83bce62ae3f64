#pragma once

#include <cstdint>

#include "dacat/tensor.hpp"

namespace dacat::nn {

struct AdamWConfig {
  double lr = 1e-4;
  double weight_decay = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// AdamW with decoupled weight decay: the decay term lr*wd*w is subtracted
// separately from the bias-corrected adaptive step. Moment buffers are
// created lazily per parameter name.
class AdamW {
 public:
  explicit AdamW(AdamWConfig cfg = {}) : cfg_(cfg) {}

  // Applies one update. Throws on non-finite gradients or shape mismatch.
  void step(ParamSet& params, const GradSet& grads);

  std::uint64_t step_count() const { return step_; }
  const AdamWConfig& config() const { return cfg_; }
  void set_lr(double lr) { cfg_.lr = lr; }

 private:
  AdamWConfig cfg_;
  GradSet m_, v_;
  std::uint64_t step_ = 0;
};

}  // namespace dacat::nn
