#pragma once

#include <cstdint>
#include <vector>

#include "dacat/train.hpp"
#include "dacat/types.hpp"

namespace dacat::data {

// Synthetic phase-stream generator. Each phase emits observations from its
// own Gaussian cluster; interference frames are redrawn from one shared
// interference cluster while keeping the true phase label, which is what
// makes purely frame-wise prediction fail on them.
struct SyntheticConfig {
  int K = 7;
  int d_raw = 12;
  double mean_dwell = 40.0;       // frames per phase before normalization
  double dwell_jitter = 0.3;      // fraction of mean_dwell
  double interference_rate = 0.0; // in [0, 1]
  double noise_scale = 1.0;
  double cluster_separation = 4.0;
  int n_videos = 1;
  int video_len = 280;
  std::uint64_t seed = 0;
  double skip_prob = 0.0;    // optional phase-sequence perturbations
  double repeat_prob = 0.0;

  void validate() const;
};

struct GeneratedVideo {
  std::vector<std::vector<double>> obs;
  PhaseTimeline labels;
  std::vector<bool> interference;  // which frames were replaced
};

// Deterministic in (config.seed, video index); videos can be generated in
// parallel because each draws from its own derived seed.
GeneratedVideo gen_stream(const SyntheticConfig& cfg, int video_index = 0);

pipeline::Dataset gen_dataset(const SyntheticConfig& cfg, int first_video = 0);

// Cluster means used by the generator; exposed for tests. Row 0..K-1 are
// the phase means, row K is the interference mean.
std::vector<std::vector<double>> cluster_means(const SyntheticConfig& cfg);

}  // namespace dacat::data
