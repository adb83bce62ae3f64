#include "dacat/engine.hpp"

#include <algorithm>

namespace dacat::pipeline {

namespace {

struct Shape2 {
  std::size_t rows, cols;
};

void require_shape(const ParamSet& params, const std::string& name,
                   std::vector<std::size_t> shape) {
  const Tensor& t = param(params, name);
  if (t.shape != shape) {
    std::string want, got;
    for (auto d : shape) want += std::to_string(d) + "x";
    for (auto d : t.shape) got += std::to_string(d) + "x";
    throw std::invalid_argument("parameter " + name + " has shape " + got +
                                " expected " + want);
  }
}

}  // namespace

std::vector<std::string> required_params(const ModelConfig& cfg) {
  std::vector<std::string> names = {"cache_enc.W", "cache_enc.b",
                                    "fwb_enc.W", "fwb_enc.b"};
  const bool acb = cfg.branch != BranchMode::FwbOnly;
  if (acb) {
    if (cfg.interaction == Interaction::CrossAttention)
      names.insert(names.end(), {"ca.Wq", "ca.Wk", "ca.Wv", "ca.Wo"});
    else if (cfg.interaction == Interaction::Concat)
      names.insert(names.end(), {"cat.W", "cat.b"});
  }
  if (cfg.fusion == FusionMode::Before) {
    names.insert(names.end(), {"fused_lstm.Wih", "fused_lstm.Whh", "fused_lstm.b",
                               "fused_head.W", "fused_head.b"});
  } else {
    if (cfg.branch != BranchMode::AcbOnly)
      names.insert(names.end(), {"fwb_lstm.Wih", "fwb_lstm.Whh", "fwb_lstm.b",
                                 "fwb_head.W", "fwb_head.b"});
    if (acb)
      names.insert(names.end(), {"acb_lstm.Wih", "acb_lstm.Whh", "acb_lstm.b",
                                 "acb_head.W", "acb_head.b"});
  }
  return names;
}

void validate_params(const ModelConfig& cfg, const ParamSet& params) {
  cfg.validate();
  const std::size_t d = cfg.d, dr = cfg.d_raw, H = cfg.hidden, K = cfg.K;
  for (const auto& name : required_params(cfg)) {
    if (name == "cache_enc.W" || name == "fwb_enc.W")
      require_shape(params, name, {d, dr});
    else if (name == "cache_enc.b" || name == "fwb_enc.b")
      require_shape(params, name, {d});
    else if (name == "ca.Wq" || name == "ca.Wk" || name == "ca.Wv" || name == "ca.Wo")
      require_shape(params, name, {d, d});
    else if (name == "cat.W")
      require_shape(params, name, {d, 2 * d});
    else if (name == "cat.b")
      require_shape(params, name, {d});
    else if (name.ends_with("lstm.Wih"))
      require_shape(params, name, {4 * H, d});
    else if (name.ends_with("lstm.Whh"))
      require_shape(params, name, {4 * H, H});
    else if (name.ends_with("lstm.b"))
      require_shape(params, name, {4 * H});
    else if (name.ends_with("head.W"))
      require_shape(params, name, {K, H});
    else if (name.ends_with("head.b"))
      require_shape(params, name, {K});
  }
}

template <class S>
OnlineEngineT<S>::OnlineEngineT(const ModelConfig& cfg, const ParamSet& params)
    : cfg_(cfg) {
  validate_params(cfg_, params);
  // Keep only what inference needs; checkpoints may carry extra tensors
  // (for example the pretraining head).
  for (const auto& name : required_params(cfg_))
    params_.emplace(name, tensor_cast<S>(param(params, name)));

  auto get = [this](const char* n) -> const TensorT<S>* {
    auto it = params_.find(n);
    return it == params_.end() ? nullptr : &it->second;
  };
  cache_W_ = get("cache_enc.W");
  cache_b_ = get("cache_enc.b");
  fwb_W_ = get("fwb_enc.W");
  fwb_b_ = get("fwb_enc.b");
  Wq_ = get("ca.Wq");
  Wk_ = get("ca.Wk");
  Wv_ = get("ca.Wv");
  Wo_ = get("ca.Wo");
  cat_W_ = get("cat.W");
  cat_b_ = get("cat.b");
  if (cfg_.fusion == FusionMode::Before) {
    f_Wih_ = get("fused_lstm.Wih");
    f_Whh_ = get("fused_lstm.Whh");
    f_b_ = get("fused_lstm.b");
    f_hW_ = get("fused_head.W");
    f_hb_ = get("fused_head.b");
  } else {
    f_Wih_ = get("fwb_lstm.Wih");
    f_Whh_ = get("fwb_lstm.Whh");
    f_b_ = get("fwb_lstm.b");
    f_hW_ = get("fwb_head.W");
    f_hb_ = get("fwb_head.b");
    a_Wih_ = get("acb_lstm.Wih");
    a_Whh_ = get("acb_lstm.Whh");
    a_b_ = get("acb_lstm.b");
    a_hW_ = get("acb_head.W");
    a_hb_ = get("acb_head.b");
  }
}

template <class S>
std::size_t OnlineEngineT<S>::clip_start(std::span<const S> query,
                                         const BasicFeatureCache<S>& cache) const {
  switch (cfg_.readout.kind) {
    case ReadoutKind::Adaptive: {
      auto s = maxr::frame_response<S>(query, cache);
      auto p = maxr::suffix_sum<S>(s);
      return maxr::select_start<S>(p);
    }
    case ReadoutKind::Fixed: {
      const std::size_t t = cache.size(), k = cfg_.readout.fixed_k;
      return k >= t ? 1 : t - k + 1;
    }
    default:
      return 1;
  }
}

template <class S>
PhasePrediction OnlineEngineT<S>::step(std::span<const S> obs,
                                       StreamStateT<S>& state) const {
  if (obs.size() != cfg_.d_raw)
    throw std::invalid_argument("step: observation dimension mismatch");
  const std::size_t d = cfg_.d, K = cfg_.K;
  const bool acb = cfg_.branch != BranchMode::FwbOnly;
  const bool fwb = cfg_.branch != BranchMode::AcbOnly;
  const bool use_ca = acb && cfg_.interaction == Interaction::CrossAttention;

  // Cache feature f_t; the cache encoder is frozen at inference, so its
  // attention projections can be computed once per frame and reused.
  std::vector<S> f(d);
  nn::encode<S>(*cache_W_, *cache_b_, obs, std::span<S>(f));
  const bool evict =
      state.cache.capacity() && state.cache.size() == *state.cache.capacity();
  state.cache.append(std::span<const S>(f));
  if (use_ca) {
    const std::size_t dk = Wk_->rows(), dv = Wv_->rows();
    if (evict) {
      state.keys.erase(state.keys.begin(), state.keys.begin() + dk);
      state.values.erase(state.values.begin(), state.values.begin() + dv);
    }
    const std::size_t nk = state.keys.size(), nv = state.values.size();
    state.keys.resize(nk + dk);
    state.values.resize(nv + dv);
    nn::affine<S>(*Wk_, nullptr, std::span<const S>(f),
                  std::span<S>(state.keys.data() + nk, dk));
    nn::affine<S>(*Wv_, nullptr, std::span<const S>(f),
                  std::span<S>(state.values.data() + nv, dv));
  }
  ++state.t;

  // Frame-wise feature F_t, also the read-out query.
  std::vector<S> F(d);
  nn::encode<S>(*fwb_W_, *fwb_b_, obs, std::span<S>(F));

  // Adaptive clip-aware feature.
  std::vector<S> Ftilde;
  if (acb) {
    const std::size_t start = clip_start(std::span<const S>(F), state.cache);
    const auto clip = state.cache.slice(start);
    Ftilde.assign(d, S(0));
    if (use_ca) {
      const std::size_t dk = Wk_->rows(), dv = Wv_->rows();
      std::vector<S> q(dk);
      nn::affine<S>(*Wq_, nullptr, std::span<const S>(F), std::span<S>(q));
      nn::attend<S>(state.keys.data() + (start - 1) * dk,
                    state.values.data() + (start - 1) * dv, clip.size(), dk, dv,
                    std::span<const S>(q), *Wo_, std::span<S>(Ftilde));
    } else {
      std::vector<S> pooled(d);
      nn::mean_pool<S>(clip, std::span<S>(pooled));
      if (cfg_.interaction == Interaction::Add) {
        for (std::size_t j = 0; j < d; ++j) Ftilde[j] = F[j] + pooled[j];
      } else {
        std::vector<S> cat(2 * d);
        std::copy(F.begin(), F.end(), cat.begin());
        std::copy(pooled.begin(), pooled.end(), cat.begin() + d);
        nn::affine<S>(*cat_W_, cat_b_, std::span<const S>(cat), std::span<S>(Ftilde));
      }
    }
  }

  PhasePrediction pred;
  pred.t = state.t;
  pred.fwb_logits.assign(K, 0.0);
  pred.acb_logits.assign(K, 0.0);
  pred.fused_logits.assign(K, 0.0);

  std::vector<S> logits(K);
  if (cfg_.fusion == FusionMode::Before) {
    std::vector<S> z(d, S(0));
    if (fwb)
      for (std::size_t j = 0; j < d; ++j) z[j] += F[j];
    if (acb)
      for (std::size_t j = 0; j < d; ++j) z[j] += Ftilde[j];
    nn::lstm_step<S>(*f_Wih_, *f_Whh_, *f_b_, std::span<const S>(z), state.fwb_lstm);
    nn::affine<S>(*f_hW_, f_hb_, std::span<const S>(state.fwb_lstm.h),
                  std::span<S>(logits));
    for (std::size_t k = 0; k < K; ++k) {
      pred.fused_logits[k] = static_cast<double>(logits[k]);
      pred.fwb_logits[k] = pred.fused_logits[k];
      pred.acb_logits[k] = pred.fused_logits[k];
    }
  } else {
    if (fwb) {
      nn::lstm_step<S>(*f_Wih_, *f_Whh_, *f_b_, std::span<const S>(F), state.fwb_lstm);
      nn::affine<S>(*f_hW_, f_hb_, std::span<const S>(state.fwb_lstm.h),
                    std::span<S>(logits));
      for (std::size_t k = 0; k < K; ++k)
        pred.fwb_logits[k] = static_cast<double>(logits[k]);
    }
    if (acb) {
      nn::lstm_step<S>(*a_Wih_, *a_Whh_, *a_b_, std::span<const S>(Ftilde),
                       state.acb_lstm);
      nn::affine<S>(*a_hW_, a_hb_, std::span<const S>(state.acb_lstm.h),
                    std::span<S>(logits));
      for (std::size_t k = 0; k < K; ++k)
        pred.acb_logits[k] = static_cast<double>(logits[k]);
    }
    for (std::size_t k = 0; k < K; ++k)
      pred.fused_logits[k] = pred.fwb_logits[k] + pred.acb_logits[k];
  }
  pred.predicted = static_cast<int>(nn::argmax<double>(pred.fused_logits));
  return pred;
}

template <class S>
typename OnlineEngineT<S>::RunResult OnlineEngineT<S>::run(
    const std::vector<std::vector<S>>& video) const {
  if (video.empty()) throw std::invalid_argument("run: empty video");
  RunResult out;
  out.log.reserve(video.size());
  out.frame_ms.reserve(video.size());
  out.timeline.labels.reserve(video.size());
  auto state = begin_stream();
  for (const auto& obs : video) {
    const auto t0 = std::chrono::steady_clock::now();
    auto pred = step(std::span<const S>(obs), state);
    const auto t1 = std::chrono::steady_clock::now();
    out.frame_ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    out.timeline.labels.push_back(pred.predicted);
    out.log.push_back(std::move(pred));
  }
  return out;
}

template class OnlineEngineT<double>;
template class OnlineEngineT<float>;

}  // namespace dacat::pipeline
