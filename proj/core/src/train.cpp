#include "dacat/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "dacat/adamw.hpp"
#include "dacat/grads.hpp"
#include "dacat/rng.hpp"

namespace dacat::pipeline {

namespace {

Tensor init_weight(std::size_t rows, std::size_t cols, Rng& rng) {
  Tensor t = Tensor::mat(rows, cols);
  const double bound = 1.0 / std::sqrt(static_cast<double>(cols));
  for (auto& v : t.v) v = rng.uniform(-bound, bound);
  return t;
}

Tensor init_lstm_bias(std::size_t hidden) {
  Tensor b = Tensor::vec(4 * hidden);
  for (std::size_t j = 0; j < hidden; ++j) b(hidden + j) = 1.0;  // forget gate
  return b;
}

void add_lstm(ParamSet& p, const std::string& prefix, std::size_t in,
              std::size_t hidden, Rng& rng) {
  p[prefix + ".Wih"] = init_weight(4 * hidden, in, rng);
  p[prefix + ".Whh"] = init_weight(4 * hidden, hidden, rng);
  p[prefix + ".b"] = init_lstm_bias(hidden);
}

void add_head(ParamSet& p, const std::string& prefix, std::size_t K,
              std::size_t hidden, Rng& rng) {
  p[prefix + ".W"] = init_weight(K, hidden, rng);
  p[prefix + ".b"] = Tensor::vec(K);
}

bool copy_group(ParamSet& dst, const std::string& dst_prefix,
                const ParamSet& src, const std::string& src_prefix,
                std::initializer_list<const char*> suffixes) {
  for (const char* s : suffixes)
    if (!src.count(src_prefix + s)) return false;
  for (const char* s : suffixes) dst[dst_prefix + s] = src.at(src_prefix + s);
  return true;
}

GradSet make_grads(const ParamSet& params, const std::vector<std::string>& names) {
  GradSet g;
  for (const auto& n : names) {
    Tensor z = param(params, n);
    z.fill(0.0);
    g.emplace(n, std::move(z));
  }
  return g;
}

void zero_grads(GradSet& g) {
  for (auto& [name, t] : g) t.fill(0.0);
}

// Everything the backward pass needs about one forward frame.
struct FrameTape {
  const std::vector<double>* obs = nullptr;
  std::vector<double> F;                    // fwb encoder output
  std::size_t clip_start = 1, clip_len = 0; // window into the video cache
  nn::CACache ca;
  std::vector<double> pooled;               // interaction add/concat
  std::vector<double> Ftilde;
  std::vector<double> z;                    // fused input (fusion before)
  nn::LSTMCache fwb_cache, acb_cache;
  std::vector<double> fused;
  int label = 0;
};

struct AccuracyCount {
  std::size_t hits = 0, total = 0;
  double value() const { return total == 0 ? 0.0 : double(hits) / double(total); }
};

}  // namespace

void Dataset::validate(const ModelConfig& cfg) const {
  if (videos.empty()) throw std::invalid_argument("dataset: no videos");
  for (const auto& v : videos) {
    if (v.obs.empty()) throw std::invalid_argument("dataset: empty video");
    if (v.obs.size() != v.labels.size())
      throw std::invalid_argument("dataset: observation/label length mismatch");
    for (const auto& o : v.obs)
      if (o.size() != cfg.d_raw)
        throw std::invalid_argument("dataset: observation dimension mismatch");
    v.labels.validate(static_cast<int>(cfg.K));
  }
}

std::size_t Dataset::total_frames() const {
  std::size_t n = 0;
  for (const auto& v : videos) n += v.obs.size();
  return n;
}

ParamSet init_stage1_params(const ModelConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Rng rng(derive_seed(seed, 0x5731));
  ParamSet p;
  p["cache_enc.W"] = init_weight(cfg.d, cfg.d_raw, rng);
  p["cache_enc.b"] = Tensor::vec(cfg.d);
  add_lstm(p, "s1_lstm", cfg.d, cfg.hidden, rng);
  add_head(p, "s1_head", cfg.K, cfg.hidden, rng);
  return p;
}

ParamSet init_dacat_params(const ModelConfig& cfg, const ParamSet& stage1,
                           std::uint64_t seed) {
  cfg.validate();
  Rng rng(derive_seed(seed, 0x5732));
  ParamSet p;
  if (!copy_group(p, "cache_enc", stage1, "cache_enc", {".W", ".b"}))
    throw std::invalid_argument("init_dacat_params: cache encoder missing");
  copy_group(p, "fwb_enc", stage1, "cache_enc", {".W", ".b"});

  const bool acb = cfg.branch != BranchMode::FwbOnly;
  // Draw every group in a fixed order so the seed stream does not depend
  // on the configuration axes that merely disable branches.
  ParamSet fresh;
  add_lstm(fresh, "lstm_a", cfg.d, cfg.hidden, rng);
  add_head(fresh, "head_a", cfg.K, cfg.hidden, rng);
  fresh["ca.Wq"] = init_weight(cfg.d, cfg.d, rng);
  fresh["ca.Wk"] = init_weight(cfg.d, cfg.d, rng);
  fresh["ca.Wv"] = init_weight(cfg.d, cfg.d, rng);
  fresh["ca.Wo"] = init_weight(cfg.d, cfg.d, rng);
  fresh["cat.W"] = init_weight(cfg.d, 2 * cfg.d, rng);
  fresh["cat.b"] = Tensor::vec(cfg.d);

  if (cfg.fusion == FusionMode::Before) {
    if (!copy_group(p, "fused_lstm", stage1, "s1_lstm", {".Wih", ".Whh", ".b"}))
      copy_group(p, "fused_lstm", fresh, "lstm_a", {".Wih", ".Whh", ".b"});
    if (!copy_group(p, "fused_head", stage1, "s1_head", {".W", ".b"}))
      copy_group(p, "fused_head", fresh, "head_a", {".W", ".b"});
  } else {
    if (cfg.branch != BranchMode::AcbOnly) {
      if (!copy_group(p, "fwb_lstm", stage1, "s1_lstm", {".Wih", ".Whh", ".b"}))
        copy_group(p, "fwb_lstm", fresh, "lstm_a", {".Wih", ".Whh", ".b"});
      if (!copy_group(p, "fwb_head", stage1, "s1_head", {".W", ".b"}))
        copy_group(p, "fwb_head", fresh, "head_a", {".W", ".b"});
    }
    if (acb) {
      // The clip-aware branch also starts from the pretrained temporal
      // predictor; its input is clip-pooled cache features, which is what
      // that predictor was trained on.
      if (!copy_group(p, "acb_lstm", stage1, "s1_lstm", {".Wih", ".Whh", ".b"}))
        add_lstm(p, "acb_lstm", cfg.d, cfg.hidden, rng);
      if (!copy_group(p, "acb_head", stage1, "s1_head", {".W", ".b"}))
        add_head(p, "acb_head", cfg.K, cfg.hidden, rng);
    }
  }
  if (acb && cfg.interaction == Interaction::CrossAttention) {
    // Near-identity attention projections: the branch begins as a plain
    // response-weighted average over the clip in the cache feature basis
    // and learns to sharpen from there.
    for (const char* n : {"ca.Wq", "ca.Wk", "ca.Wv", "ca.Wo"}) {
      Tensor t = fresh.at(n);
      const double damp = 0.1;
      for (auto& v : t.v) v *= damp;
      for (std::size_t i = 0; i < cfg.d; ++i) t(i, i) += 1.0;
      p[n] = t;
    }
  }
  if (acb && cfg.interaction == Interaction::Concat) {
    p["cat.W"] = fresh.at("cat.W");
    p["cat.b"] = fresh.at("cat.b");
  }
  return p;
}

TrainResult train_cache_encoder(const Dataset& data, const ModelConfig& cfg,
                                const StageOptions& opt) {
  data.validate(cfg);
  const std::size_t d = cfg.d, H = cfg.hidden, K = cfg.K;
  if (opt.segment_len < 1) throw std::invalid_argument("segment_len must be >= 1");

  TrainResult res;
  res.params = init_stage1_params(cfg, cfg.seed);
  ParamSet& P = res.params;
  const std::vector<std::string> trainable = {
      "cache_enc.W", "cache_enc.b", "s1_lstm.Wih", "s1_lstm.Whh",
      "s1_lstm.b",   "s1_head.W",   "s1_head.b"};
  GradSet grads = make_grads(P, trainable);
  nn::AdamW adamw({opt.lr, opt.weight_decay});

  struct S1Tape {
    const std::vector<double>* obs;
    std::vector<double> f;
    nn::LSTMCache lstm;
    std::vector<double> logits;
    int label;
  };

  for (std::size_t epoch = 0; epoch < opt.epochs; ++epoch) {
    double loss_sum = 0.0;
    std::size_t frames = 0;
    for (const auto& video : data.videos) {
      nn::LSTMState state(H);
      const std::size_t n = video.obs.size();
      for (std::size_t seg = 0; seg < n; seg += opt.segment_len) {
        const std::size_t seg_end = std::min(n, seg + opt.segment_len);
        const std::size_t m = seg_end - seg;
        std::vector<S1Tape> tape(m);
        for (std::size_t i = 0; i < m; ++i) {
          auto& fr = tape[i];
          fr.obs = &video.obs[seg + i];
          fr.label = video.labels.labels[seg + i];
          fr.f.resize(d);
          nn::encode<double>(P.at("cache_enc.W"), P.at("cache_enc.b"), *fr.obs,
                             std::span<double>(fr.f));
          nn::lstm_step<double>(P.at("s1_lstm.Wih"), P.at("s1_lstm.Whh"),
                                P.at("s1_lstm.b"), fr.f, state, &fr.lstm);
          fr.logits.resize(K);
          nn::affine<double>(P.at("s1_head.W"), &P.at("s1_head.b"), state.h,
                             std::span<double>(fr.logits));
          loss_sum += nn::cross_entropy<double>(fr.logits, fr.label);
        }
        frames += m;

        zero_grads(grads);
        std::vector<double> dh(H, 0.0), dc(H, 0.0);
        const double scale = 1.0 / static_cast<double>(m);
        for (std::size_t i = m; i-- > 0;) {
          auto& fr = tape[i];
          std::vector<double> dlogits(K, 0.0);
          nn::cross_entropy_backward(fr.logits, fr.label, scale, dlogits);
          // head input is this frame's h = o * tanh(c), recovered from the tape
          std::vector<double> h_in(H);
          for (std::size_t j = 0; j < H; ++j)
            h_in[j] = fr.lstm.gates[3 * H + j] * fr.lstm.tanh_c[j];
          nn::affine_backward(P.at("s1_head.W"), h_in, dlogits,
                              &grads.at("s1_head.W"), &grads.at("s1_head.b"), dh);
          std::vector<double> df(d, 0.0), dh_prev(H, 0.0), dc_prev(H, 0.0);
          nn::lstm_backward(P.at("s1_lstm.Wih"), P.at("s1_lstm.Whh"), fr.lstm,
                            dh, dc, &grads.at("s1_lstm.Wih"),
                            &grads.at("s1_lstm.Whh"), &grads.at("s1_lstm.b"),
                            df, dh_prev, dc_prev);
          nn::encode_backward(P.at("cache_enc.W"), *fr.obs, fr.f, df,
                              &grads.at("cache_enc.W"), &grads.at("cache_enc.b"),
                              {});
          dh = std::move(dh_prev);
          dc = std::move(dc_prev);
        }
        adamw.step(P, grads);
      }
    }
    res.epoch_loss.push_back(loss_sum / static_cast<double>(frames));
    if (opt.verbose)
      std::printf("stage1 epoch %zu/%zu loss %.6f\n", epoch + 1, opt.epochs,
                  res.epoch_loss.back());
  }

  AccuracyCount acc;
  for (const auto& video : data.videos) {
    auto logits = stage1_forward_logits(P, cfg, video.obs);
    for (std::size_t i = 0; i < logits.size(); ++i) {
      acc.total++;
      if (static_cast<int>(nn::argmax<double>(logits[i])) ==
          video.labels.labels[i])
        acc.hits++;
    }
  }
  res.final_train_accuracy = acc.value();
  return res;
}

namespace {

// Shared forward step of the full model used by the trainer and the
// forward-only entry point. The cache is the video-level feature cache.
void dacat_forward_frame(const ParamSet& P, const ModelConfig& cfg,
                         FeatureCache& cache, nn::LSTMState& st_f,
                         nn::LSTMState& st_a, const std::vector<double>& obs,
                         FrameTape& fr) {
  const std::size_t d = cfg.d, H = cfg.hidden, K = cfg.K;
  const bool acb = cfg.branch != BranchMode::FwbOnly;
  const bool fwb = cfg.branch != BranchMode::AcbOnly;

  std::vector<double> f(d);
  nn::encode<double>(P.at("cache_enc.W"), P.at("cache_enc.b"), obs,
                     std::span<double>(f));
  cache.append(f);

  fr.obs = &obs;
  fr.F.resize(d);
  nn::encode<double>(P.at("fwb_enc.W"), P.at("fwb_enc.b"), obs,
                     std::span<double>(fr.F));

  if (acb) {
    const std::size_t t = cache.size();
    switch (cfg.readout.kind) {
      case ReadoutKind::Adaptive: {
        auto s = maxr::frame_response<double>(fr.F, cache);
        auto p = maxr::suffix_sum<double>(s);
        fr.clip_start = maxr::select_start<double>(p);
        break;
      }
      case ReadoutKind::Fixed:
        fr.clip_start = cfg.readout.fixed_k >= t ? 1 : t - cfg.readout.fixed_k + 1;
        break;
      default:
        fr.clip_start = 1;
    }
    fr.clip_len = t - fr.clip_start + 1;
    const ClipView clip = cache.slice(fr.clip_start);
    fr.Ftilde.assign(d, 0.0);
    if (cfg.interaction == Interaction::CrossAttention) {
      nn::cross_attention<double>(P.at("ca.Wq"), P.at("ca.Wk"), P.at("ca.Wv"),
                                  P.at("ca.Wo"), fr.F, clip,
                                  std::span<double>(fr.Ftilde), &fr.ca);
    } else {
      fr.pooled.resize(d);
      nn::mean_pool<double>(clip, std::span<double>(fr.pooled));
      if (cfg.interaction == Interaction::Add) {
        for (std::size_t j = 0; j < d; ++j) fr.Ftilde[j] = fr.F[j] + fr.pooled[j];
      } else {
        nn::concat_project(P.at("cat.W"), P.at("cat.b"), fr.F, fr.pooled,
                           std::span<double>(fr.Ftilde));
      }
    }
  }

  fr.fused.assign(K, 0.0);
  if (cfg.fusion == FusionMode::Before) {
    fr.z.assign(d, 0.0);
    if (fwb)
      for (std::size_t j = 0; j < d; ++j) fr.z[j] += fr.F[j];
    if (acb)
      for (std::size_t j = 0; j < d; ++j) fr.z[j] += fr.Ftilde[j];
    nn::lstm_step<double>(P.at("fused_lstm.Wih"), P.at("fused_lstm.Whh"),
                          P.at("fused_lstm.b"), fr.z, st_f, &fr.fwb_cache);
    nn::affine<double>(P.at("fused_head.W"), &P.at("fused_head.b"), st_f.h,
                       std::span<double>(fr.fused));
  } else {
    std::vector<double> logits(K);
    if (fwb) {
      nn::lstm_step<double>(P.at("fwb_lstm.Wih"), P.at("fwb_lstm.Whh"),
                            P.at("fwb_lstm.b"), fr.F, st_f, &fr.fwb_cache);
      nn::affine<double>(P.at("fwb_head.W"), &P.at("fwb_head.b"), st_f.h,
                         std::span<double>(logits));
      for (std::size_t k = 0; k < K; ++k) fr.fused[k] += logits[k];
    }
    if (acb) {
      nn::lstm_step<double>(P.at("acb_lstm.Wih"), P.at("acb_lstm.Whh"),
                            P.at("acb_lstm.b"), fr.Ftilde, st_a, &fr.acb_cache);
      nn::affine<double>(P.at("acb_head.W"), &P.at("acb_head.b"), st_a.h,
                         std::span<double>(logits));
      for (std::size_t k = 0; k < K; ++k) fr.fused[k] += logits[k];
    }
  }
}

}  // namespace

double dacat_segment_step(const ParamSet& P, const ModelConfig& cfg,
                          FeatureCache& cache, nn::LSTMState& st_f,
                          nn::LSTMState& st_a,
                          std::span<const std::vector<double>> obs,
                          std::span<const int> labels, GradSet* grads) {
  const std::size_t d = cfg.d, H = cfg.hidden, K = cfg.K;
  const bool acb = cfg.branch != BranchMode::FwbOnly;
  const bool fwb = cfg.branch != BranchMode::AcbOnly;
  const std::size_t m = obs.size();
  if (m == 0 || labels.size() != m)
    throw std::invalid_argument("dacat_segment_step: bad segment");

  double loss_sum = 0.0;
  std::vector<FrameTape> tape(m);
  for (std::size_t i = 0; i < m; ++i) {
    auto& fr = tape[i];
    fr.label = labels[i];
    dacat_forward_frame(P, cfg, cache, st_f, st_a, obs[i], fr);
    loss_sum += nn::cross_entropy<double>(fr.fused, fr.label);
  }
  if (!grads) return loss_sum;
  GradSet& g = *grads;

  std::vector<double> dh_f(H, 0.0), dc_f(H, 0.0);
  std::vector<double> dh_a(H, 0.0), dc_a(H, 0.0);
  const double scale = 1.0 / static_cast<double>(m);
  for (std::size_t i = m; i-- > 0;) {
    auto& fr = tape[i];
    std::vector<double> dlogits(K, 0.0);
    nn::cross_entropy_backward(fr.fused, fr.label, scale, dlogits);

    std::vector<double> dF(d, 0.0), dFtilde(d, 0.0);
    if (cfg.fusion == FusionMode::Before) {
      std::vector<double> h_in(H);
      for (std::size_t j = 0; j < H; ++j)
        h_in[j] = fr.fwb_cache.gates[3 * H + j] * fr.fwb_cache.tanh_c[j];
      nn::affine_backward(P.at("fused_head.W"), h_in, dlogits,
                          &g.at("fused_head.W"), &g.at("fused_head.b"), dh_f);
      std::vector<double> dz(d, 0.0), dhp(H, 0.0), dcp(H, 0.0);
      nn::lstm_backward(P.at("fused_lstm.Wih"), P.at("fused_lstm.Whh"),
                        fr.fwb_cache, dh_f, dc_f, &g.at("fused_lstm.Wih"),
                        &g.at("fused_lstm.Whh"), &g.at("fused_lstm.b"), dz, dhp,
                        dcp);
      dh_f = std::move(dhp);
      dc_f = std::move(dcp);
      if (fwb)
        for (std::size_t j = 0; j < d; ++j) dF[j] += dz[j];
      if (acb)
        for (std::size_t j = 0; j < d; ++j) dFtilde[j] += dz[j];
    } else {
      if (fwb) {
        std::vector<double> h_in(H);
        for (std::size_t j = 0; j < H; ++j)
          h_in[j] = fr.fwb_cache.gates[3 * H + j] * fr.fwb_cache.tanh_c[j];
        nn::affine_backward(P.at("fwb_head.W"), h_in, dlogits,
                            &g.at("fwb_head.W"), &g.at("fwb_head.b"), dh_f);
        std::vector<double> dhp(H, 0.0), dcp(H, 0.0);
        nn::lstm_backward(P.at("fwb_lstm.Wih"), P.at("fwb_lstm.Whh"),
                          fr.fwb_cache, dh_f, dc_f, &g.at("fwb_lstm.Wih"),
                          &g.at("fwb_lstm.Whh"), &g.at("fwb_lstm.b"), dF, dhp,
                          dcp);
        dh_f = std::move(dhp);
        dc_f = std::move(dcp);
      }
      if (acb) {
        std::vector<double> h_in(H);
        for (std::size_t j = 0; j < H; ++j)
          h_in[j] = fr.acb_cache.gates[3 * H + j] * fr.acb_cache.tanh_c[j];
        nn::affine_backward(P.at("acb_head.W"), h_in, dlogits,
                            &g.at("acb_head.W"), &g.at("acb_head.b"), dh_a);
        std::vector<double> dhp(H, 0.0), dcp(H, 0.0);
        nn::lstm_backward(P.at("acb_lstm.Wih"), P.at("acb_lstm.Whh"),
                          fr.acb_cache, dh_a, dc_a, &g.at("acb_lstm.Wih"),
                          &g.at("acb_lstm.Whh"), &g.at("acb_lstm.b"), dFtilde,
                          dhp, dcp);
        dh_a = std::move(dhp);
        dc_a = std::move(dcp);
      }
    }

    if (acb) {
      // Interaction backward. Gradients stop at the cached clip features;
      // the selection index is a constant.
      if (cfg.interaction == Interaction::CrossAttention) {
        const ClipView clip =
            ClipView(cache.data() + (fr.clip_start - 1) * d, fr.clip_len, d);
        nn::cross_attention_backward(
            P.at("ca.Wq"), P.at("ca.Wk"), P.at("ca.Wv"), P.at("ca.Wo"), fr.F,
            clip, fr.ca, dFtilde, &g.at("ca.Wq"), &g.at("ca.Wk"),
            &g.at("ca.Wv"), &g.at("ca.Wo"), dF, {});
      } else if (cfg.interaction == Interaction::Add) {
        for (std::size_t j = 0; j < d; ++j) dF[j] += dFtilde[j];
      } else {
        nn::concat_project_backward(P.at("cat.W"), fr.F, fr.pooled, dFtilde,
                                    &g.at("cat.W"), &g.at("cat.b"), dF, {});
      }
    }
    nn::encode_backward(P.at("fwb_enc.W"), *fr.obs, fr.F, dF,
                        &g.at("fwb_enc.W"), &g.at("fwb_enc.b"), {});
  }
  return loss_sum;
}

TrainResult train_dacat(const Dataset& data, const ParamSet& cache_params,
                        const ModelConfig& cfg, const StageOptions& opt) {
  return train_dacat_params(data, init_dacat_params(cfg, cache_params, cfg.seed),
                            cfg, opt);
}

TrainResult train_dacat_params(const Dataset& data, ParamSet initial,
                               const ModelConfig& cfg, const StageOptions& opt) {
  data.validate(cfg);
  const std::size_t d = cfg.d, H = cfg.hidden;
  if (opt.segment_len < 1) throw std::invalid_argument("segment_len must be >= 1");

  TrainResult res;
  res.params = std::move(initial);
  ParamSet& P = res.params;
  validate_params(cfg, P);

  // The cache encoder is frozen: it never gets gradient buffers, so the
  // optimizer cannot touch it.
  std::vector<std::string> trainable;
  for (const auto& n : required_params(cfg))
    if (!n.starts_with("cache_enc.")) trainable.push_back(n);
  GradSet grads = make_grads(P, trainable);
  nn::AdamW adamw({opt.lr, opt.weight_decay});

  for (std::size_t epoch = 0; epoch < opt.epochs; ++epoch) {
    double loss_sum = 0.0;
    std::size_t frames = 0;
    for (const auto& video : data.videos) {
      FeatureCache cache(d);  // rebuilt from frame 1 for each video pass
      nn::LSTMState st_f(H), st_a(H);
      const std::size_t n = video.obs.size();
      for (std::size_t seg = 0; seg < n; seg += opt.segment_len) {
        const std::size_t m = std::min(n, seg + opt.segment_len) - seg;
        zero_grads(grads);
        loss_sum += dacat_segment_step(
            P, cfg, cache, st_f, st_a,
            std::span<const std::vector<double>>(video.obs.data() + seg, m),
            std::span<const int>(video.labels.labels.data() + seg, m), &grads);
        frames += m;
        adamw.step(P, grads);
      }
    }
    res.epoch_loss.push_back(loss_sum / static_cast<double>(frames));
    if (opt.verbose)
      std::printf("stage2 epoch %zu/%zu loss %.6f\n", epoch + 1, opt.epochs,
                  res.epoch_loss.back());
  }

  OnlineEngine engine(cfg, P);
  AccuracyCount acc;
  for (const auto& video : data.videos) {
    auto run = engine.run(video.obs);
    for (std::size_t i = 0; i < run.timeline.labels.size(); ++i) {
      acc.total++;
      if (run.timeline.labels[i] == video.labels.labels[i]) acc.hits++;
    }
  }
  res.final_train_accuracy = acc.value();
  return res;
}

std::vector<std::vector<double>> dacat_forward_logits(
    const ParamSet& params, const ModelConfig& cfg,
    const std::vector<std::vector<double>>& obs,
    const std::vector<std::size_t>& segment_lens) {
  FeatureCache cache(cfg.d);
  nn::LSTMState st_f(cfg.hidden), st_a(cfg.hidden);
  std::vector<std::vector<double>> out;
  out.reserve(obs.size());
  std::size_t pos = 0;
  auto run_segment = [&](std::size_t len) {
    for (std::size_t i = 0; i < len && pos < obs.size(); ++i, ++pos) {
      FrameTape fr;
      dacat_forward_frame(params, cfg, cache, st_f, st_a, obs[pos], fr);
      out.push_back(fr.fused);
    }
  };
  for (std::size_t len : segment_lens) run_segment(len);
  if (pos < obs.size()) run_segment(obs.size() - pos);
  return out;
}

std::vector<std::vector<double>> stage1_forward_logits(
    const ParamSet& params, const ModelConfig& cfg,
    const std::vector<std::vector<double>>& obs) {
  nn::LSTMState state(cfg.hidden);
  std::vector<double> f(cfg.d);
  std::vector<std::vector<double>> out;
  out.reserve(obs.size());
  for (const auto& x : obs) {
    nn::encode<double>(param(params, "cache_enc.W"), param(params, "cache_enc.b"),
                       x, std::span<double>(f));
    nn::lstm_step<double>(param(params, "s1_lstm.Wih"), param(params, "s1_lstm.Whh"),
                          param(params, "s1_lstm.b"), f, state);
    std::vector<double> logits(cfg.K);
    nn::affine<double>(param(params, "s1_head.W"), &param(params, "s1_head.b"),
                       state.h, std::span<double>(logits));
    out.push_back(std::move(logits));
  }
  return out;
}

}  // namespace dacat::pipeline
