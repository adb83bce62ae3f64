#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dacat {

// One frame's pooled embedding. Dimension is fixed per run.
using FeatureVector = std::vector<double>;

enum class FusionMode { After, Before };
enum class Interaction { Add, Concat, CrossAttention };
enum class ReadoutKind { Adaptive, Fixed, All };
enum class BranchMode { Both, FwbOnly, AcbOnly };

struct Readout {
  ReadoutKind kind = ReadoutKind::Adaptive;
  std::size_t fixed_k = 0;  // used when kind == Fixed

  static Readout adaptive() { return {ReadoutKind::Adaptive, 0}; }
  static Readout all() { return {ReadoutKind::All, 0}; }
  static Readout fixed(std::size_t k) { return {ReadoutKind::Fixed, k}; }
};

struct ModelConfig {
  std::size_t d = 768;      // embedding dimension
  std::size_t d_raw = 768;  // raw observation dimension
  std::size_t K = 7;        // number of phases
  std::size_t hidden = 128; // LSTM hidden size
  FusionMode fusion = FusionMode::After;
  Interaction interaction = Interaction::CrossAttention;
  Readout readout = Readout::adaptive();
  BranchMode branch = BranchMode::Both;  // branch ablation axis
  std::uint64_t seed = 0;
  std::optional<std::size_t> cache_capacity;  // unbounded when unset

  void validate() const {
    if (d < 1 || d_raw < 1 || K < 1 || hidden < 1)
      throw std::invalid_argument("ModelConfig: d, d_raw, K, hidden must be >= 1");
    if (readout.kind == ReadoutKind::Fixed && readout.fixed_k < 1)
      throw std::invalid_argument("ModelConfig: fixed readout requires k >= 1");
    if (cache_capacity && *cache_capacity < 1)
      throw std::invalid_argument("ModelConfig: cache capacity must be >= 1");
  }
};

// Per-frame integer phase labels for one video, ground truth or predicted.
struct PhaseTimeline {
  std::vector<int> labels;
  double fps = 1.0;

  std::size_t size() const { return labels.size(); }

  void validate(int num_phases) const {
    for (int l : labels)
      if (l < 0 || l >= num_phases)
        throw std::invalid_argument("PhaseTimeline: label " + std::to_string(l) +
                                    " outside [0, " + std::to_string(num_phases) + ")");
  }
};

inline std::string to_string(FusionMode m) {
  return m == FusionMode::After ? "after" : "before";
}

inline std::string to_string(Interaction i) {
  switch (i) {
    case Interaction::Add: return "add";
    case Interaction::Concat: return "concat";
    default: return "ca";
  }
}

inline std::string to_string(const Readout& r) {
  switch (r.kind) {
    case ReadoutKind::Adaptive: return "adaptive";
    case ReadoutKind::All: return "all";
    default: return "fixed:" + std::to_string(r.fixed_k);
  }
}

inline std::string to_string(BranchMode b) {
  switch (b) {
    case BranchMode::Both: return "both";
    case BranchMode::FwbOnly: return "fwb";
    default: return "acb";
  }
}

}  // namespace dacat
