#include "dacat/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "dacat/rng.hpp"

namespace dacat::data {

void SyntheticConfig::validate() const {
  if (K < 1) throw std::invalid_argument("SyntheticConfig: K must be >= 1");
  if (d_raw < 1) throw std::invalid_argument("SyntheticConfig: d_raw must be >= 1");
  if (interference_rate < 0.0 || interference_rate > 1.0)
    throw std::invalid_argument("SyntheticConfig: interference_rate outside [0, 1]");
  if (skip_prob < 0.0 || skip_prob > 1.0 || repeat_prob < 0.0 || repeat_prob > 1.0)
    throw std::invalid_argument("SyntheticConfig: perturbation prob outside [0, 1]");
  if (mean_dwell <= 0.0) throw std::invalid_argument("SyntheticConfig: mean_dwell <= 0");
  if (dwell_jitter < 0.0 || dwell_jitter >= 1.0)
    throw std::invalid_argument("SyntheticConfig: dwell_jitter outside [0, 1)");
  if (noise_scale < 0.0) throw std::invalid_argument("SyntheticConfig: noise_scale < 0");
  if (n_videos < 1) throw std::invalid_argument("SyntheticConfig: n_videos < 1");
  if (video_len < K && skip_prob == 0.0)
    throw std::invalid_argument(
        "SyntheticConfig: video_len must be >= K for monotone progression");
}

std::vector<std::vector<double>> cluster_means(const SyntheticConfig& cfg) {
  const int K = cfg.K, d = cfg.d_raw;
  const double sep = cfg.cluster_separation;
  std::vector<std::vector<double>> means(K + 1, std::vector<double>(d, 0.0));
  if (d >= K) {
    // Phase means: a shared offset plus centered one-hot directions of
    // unit norm and pairwise correlation -1/(K-1), so extending a clip
    // into the previous phase lowers its summed response. The
    // interference cluster sits exactly at the shared offset: the common
    // scene appearance without the phase-discriminating component. Its
    // frames respond equally to every query, so the read-out bridges them
    // inside a phase and falls back to the whole history when the query
    // itself is an interference frame.
    const double norm = std::sqrt(1.0 - 1.0 / K);
    const double offset = 0.5 * sep / std::sqrt(static_cast<double>(d));
    for (int k = 0; k <= K; ++k)
      for (int j = 0; j < d; ++j) means[k][j] = offset;
    for (int k = 0; k < K; ++k) {
      for (int j = 0; j < K; ++j)
        means[k][j] += ((j == k ? 1.0 : 0.0) - 1.0 / K) / norm * sep;
    }
  } else {
    // Not enough axes; fall back to random unit directions.
    Rng rng(derive_seed(cfg.seed, 0xC1A5));
    for (int k = 0; k <= K; ++k) {
      double n2 = 0.0;
      for (int j = 0; j < d; ++j) {
        means[k][j] = rng.normal();
        n2 += means[k][j] * means[k][j];
      }
      const double inv = sep / std::sqrt(n2);
      for (int j = 0; j < d; ++j) means[k][j] *= inv;
    }
  }
  return means;
}

namespace {

// Phase visit order: 0..K-1, optionally with skipped phases and repeats
// of earlier phases (sequence variation across patients).
std::vector<int> phase_sequence(const SyntheticConfig& cfg, Rng& rng) {
  std::vector<int> seq;
  for (int k = 0; k < cfg.K; ++k) {
    if (cfg.skip_prob > 0.0 && cfg.K > 1 && rng.bernoulli(cfg.skip_prob) &&
        !(k == cfg.K - 1 && seq.empty()))
      continue;
    if (!seq.empty() && cfg.repeat_prob > 0.0 && rng.bernoulli(cfg.repeat_prob))
      seq.push_back(seq[rng.below(seq.size())]);
    seq.push_back(k);
  }
  if (seq.empty()) seq.push_back(0);
  return seq;
}

// Dwell lengths >= 1 summing exactly to video_len.
std::vector<int> dwell_lengths(const SyntheticConfig& cfg, std::size_t n_segments,
                               Rng& rng) {
  std::vector<double> raw(n_segments);
  for (auto& r : raw)
    r = std::max(1e-3, cfg.mean_dwell * (1.0 + cfg.dwell_jitter * rng.uniform(-1.0, 1.0)));
  const double total = std::accumulate(raw.begin(), raw.end(), 0.0);
  const double scale = static_cast<double>(cfg.video_len) / total;

  std::vector<int> len(n_segments);
  int assigned = 0;
  std::vector<std::pair<double, std::size_t>> rema(n_segments);
  for (std::size_t i = 0; i < n_segments; ++i) {
    const double exact = raw[i] * scale;
    len[i] = std::max(1, static_cast<int>(std::floor(exact)));
    assigned += len[i];
    rema[i] = {exact - std::floor(exact), i};
  }
  // Distribute the rounding remainder, largest fractional part first.
  std::sort(rema.begin(), rema.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::size_t ri = 0;
  while (assigned < cfg.video_len) {
    len[rema[ri % n_segments].second]++;
    ++assigned;
    ++ri;
  }
  while (assigned > cfg.video_len) {
    auto it = std::max_element(len.begin(), len.end());
    if (*it <= 1) throw std::invalid_argument("gen_stream: video_len too short");
    (*it)--;
    --assigned;
  }
  return len;
}

}  // namespace

GeneratedVideo gen_stream(const SyntheticConfig& cfg, int video_index) {
  cfg.validate();
  Rng rng(derive_seed(cfg.seed, 0xD0 + static_cast<std::uint64_t>(video_index)));
  const auto means = cluster_means(cfg);

  const auto seq = phase_sequence(cfg, rng);
  const auto dwell = dwell_lengths(cfg, seq.size(), rng);

  GeneratedVideo v;
  v.obs.reserve(cfg.video_len);
  v.labels.labels.reserve(cfg.video_len);
  v.labels.fps = 1.0;
  v.interference.reserve(cfg.video_len);

  for (std::size_t s = 0; s < seq.size(); ++s) {
    const int phase = seq[s];
    for (int i = 0; i < dwell[s]; ++i) {
      const bool interf = rng.bernoulli(cfg.interference_rate);
      const auto& mu = interf ? means[cfg.K] : means[phase];
      std::vector<double> x(cfg.d_raw);
      for (int j = 0; j < cfg.d_raw; ++j)
        x[j] = mu[j] + cfg.noise_scale * rng.normal();
      v.obs.push_back(std::move(x));
      v.labels.labels.push_back(phase);
      v.interference.push_back(interf);
    }
  }
  return v;
}

pipeline::Dataset gen_dataset(const SyntheticConfig& cfg, int first_video) {
  cfg.validate();
  pipeline::Dataset ds;
  ds.videos.reserve(cfg.n_videos);
  for (int i = 0; i < cfg.n_videos; ++i) {
    auto g = gen_stream(cfg, first_video + i);
    ds.videos.push_back({std::move(g.obs), std::move(g.labels)});
  }
  return ds;
}

}  // namespace dacat::data
