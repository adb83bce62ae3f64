#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "dacat/feature_cache.hpp"
#include "dacat/maxr.hpp"
#include "dacat/tensor.hpp"

// Forward kernels for the small operator set the model is built from.
// Everything is scalar-templated so the inference engine can run in
// float or double; training instantiates double only.
namespace dacat::nn {

template <class S>
struct LSTMStateT {
  std::vector<S> h, c;

  LSTMStateT() = default;
  explicit LSTMStateT(std::size_t hidden) : h(hidden, S(0)), c(hidden, S(0)) {}
  std::size_t size() const { return h.size(); }
};

using LSTMState = LSTMStateT<double>;

// y = W x (+ b). b may be null for bias-free projections.
template <class S>
void affine(const TensorT<S>& W, const TensorT<S>* b, std::span<const S> x,
            std::span<S> y) {
  if (W.rank() != 2 || W.cols() != x.size() || W.rows() != y.size())
    throw std::invalid_argument("affine: shape mismatch");
  if (b && b->numel() != W.rows())
    throw std::invalid_argument("affine: bias shape mismatch");
  for (std::size_t r = 0; r < W.rows(); ++r) {
    S acc = maxr::detail::dot(W.row(r), x.data(), x.size());
    y[r] = b ? acc + (*b)(r) : acc;
  }
}

template <class S>
void tanh_inplace(std::span<S> x) {
  for (auto& v : x) v = std::tanh(v);
}

// Toy observation encoder: tanh(W x + b).
template <class S>
void encode(const TensorT<S>& W, const TensorT<S>& b, std::span<const S> x,
            std::span<S> y) {
  affine<S>(W, &b, x, y);
  tanh_inplace<S>(y);
}

template <class S>
inline S sigmoid(S x) {
  return S(1) / (S(1) + std::exp(-x));
}

// Intermediates needed to backpropagate one LSTM step.
template <class S>
struct LSTMCacheT {
  std::vector<S> x, h_prev, c_prev;
  std::vector<S> gates;  // i, f, g, o after their activations, 4*H
  std::vector<S> c_new, tanh_c;
};

using LSTMCache = LSTMCacheT<double>;

// Standard LSTM recurrence with gate order i, f, g, o:
//   i,f,o = sigmoid(W_ih x + W_hh h + b), g = tanh(...)
//   c' = f*c + i*g, h' = o*tanh(c')
// State is updated in place; `cache`, when given, receives what the
// backward pass needs.
template <class S>
void lstm_step(const TensorT<S>& Wih, const TensorT<S>& Whh, const TensorT<S>& bias,
               std::span<const S> x, LSTMStateT<S>& state,
               LSTMCacheT<S>* cache = nullptr) {
  const std::size_t H = state.size();
  if (Wih.rank() != 2 || Wih.rows() != 4 * H || Wih.cols() != x.size() ||
      Whh.rank() != 2 || Whh.rows() != 4 * H || Whh.cols() != H ||
      bias.numel() != 4 * H)
    throw std::invalid_argument("lstm_step: shape mismatch");

  std::vector<S> pre(4 * H);
  for (std::size_t r = 0; r < 4 * H; ++r) {
    S acc = maxr::detail::dot(Wih.row(r), x.data(), x.size());
    acc += maxr::detail::dot(Whh.row(r), state.h.data(), H);
    pre[r] = acc + bias(r);
  }
  std::vector<S> gates(4 * H);
  for (std::size_t j = 0; j < H; ++j) {
    gates[j] = sigmoid(pre[j]);                    // i
    gates[H + j] = sigmoid(pre[H + j]);            // f
    gates[2 * H + j] = std::tanh(pre[2 * H + j]);  // g
    gates[3 * H + j] = sigmoid(pre[3 * H + j]);    // o
  }

  if (cache) {
    cache->x.assign(x.begin(), x.end());
    cache->h_prev = state.h;
    cache->c_prev = state.c;
  }
  std::vector<S> tanh_c(H);
  for (std::size_t j = 0; j < H; ++j) {
    state.c[j] = gates[H + j] * state.c[j] + gates[j] * gates[2 * H + j];
    tanh_c[j] = std::tanh(state.c[j]);
    state.h[j] = gates[3 * H + j] * tanh_c[j];
  }
  if (cache) {
    cache->gates = std::move(gates);
    cache->c_new = state.c;
    cache->tanh_c = std::move(tanh_c);
  }
}

// Max-subtracted softmax; output sums to one.
template <class S>
void softmax_inplace(std::span<S> z) {
  if (z.empty()) throw std::invalid_argument("softmax: empty input");
  S m = z[0];
  for (S v : z) m = v > m ? v : m;
  S sum = 0;
  for (auto& v : z) {
    v = std::exp(v - m);
    sum += v;
  }
  for (auto& v : z) v /= sum;
}

// -log softmax(logits)[target], max-subtracted for stability.
template <class S>
S cross_entropy(std::span<const S> logits, int target) {
  if (target < 0 || static_cast<std::size_t>(target) >= logits.size())
    throw std::invalid_argument("cross_entropy: target out of range");
  S m = logits[0];
  for (S v : logits) m = v > m ? v : m;
  S lse = 0;
  for (S v : logits) lse += std::exp(v - m);
  return std::log(lse) - (logits[target] - m);
}

// Elementwise mean across the clip (temporal average pooling).
template <class S>
void mean_pool(ClipViewT<S> clip, std::span<S> out) {
  if (clip.empty()) throw std::invalid_argument("mean_pool: empty clip");
  if (out.size() != clip.dim()) throw std::invalid_argument("mean_pool: dim mismatch");
  std::fill(out.begin(), out.end(), S(0));
  for (std::size_t i = 0; i < clip.size(); ++i) {
    const S* r = clip.row(i).data();
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += r[j];
  }
  const S inv = S(1) / static_cast<S>(clip.size());
  for (auto& v : out) v *= inv;
}

// Smallest index of a maximal element.
template <class S>
std::size_t argmax(std::span<const S> v) {
  if (v.empty()) throw std::invalid_argument("argmax: empty input");
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

// Attention core over pre-projected keys/values stored as contiguous
// rows: w = softmax(q . K_i / sqrt(dk)), out = Wo (sum_i w_i V_i).
// `weights_out`, when given, receives the attention distribution.
template <class S>
void attend(const S* keys, const S* values, std::size_t len, std::size_t dk,
            std::size_t dv, std::span<const S> q, const TensorT<S>& Wo,
            std::span<S> out, std::vector<S>* weights_out = nullptr,
            std::vector<S>* ctx_out = nullptr) {
  if (len == 0) throw std::invalid_argument("attend: empty clip");
  if (q.size() != dk) throw std::invalid_argument("attend: query dim mismatch");
  const S scale = S(1) / std::sqrt(static_cast<S>(dk));
  std::vector<S> w(len);
  for (std::size_t i = 0; i < len; ++i)
    w[i] = maxr::detail::dot(q.data(), keys + i * dk, dk) * scale;
  softmax_inplace<S>(std::span<S>(w));
  std::vector<S> ctx(dv, S(0));
  for (std::size_t i = 0; i < len; ++i) {
    const S* vr = values + i * dv;
    const S wi = w[i];
    for (std::size_t j = 0; j < dv; ++j) ctx[j] += wi * vr[j];
  }
  affine<S>(Wo, nullptr, std::span<const S>(ctx), out);
  if (weights_out) *weights_out = std::move(w);
  if (ctx_out) *ctx_out = std::move(ctx);
}

// Intermediates for the cross-attention backward pass.
template <class S>
struct CACacheT {
  std::vector<S> q;             // Wq query
  std::vector<S> keys, values;  // len x dk, len x dv
  std::vector<S> w;             // attention weights
  std::vector<S> ctx;           // weighted value sum
  std::size_t len = 0;
};

using CACache = CACacheT<double>;

// Single-head scaled dot-product cross-attention between the current
// frame (query) and a clip of cached features (keys and values). All four
// projections are bias-free.
template <class S>
void cross_attention(const TensorT<S>& Wq, const TensorT<S>& Wk,
                     const TensorT<S>& Wv, const TensorT<S>& Wo,
                     std::span<const S> query, ClipViewT<S> clip,
                     std::span<S> out, CACacheT<S>* cache = nullptr) {
  if (clip.empty()) throw std::invalid_argument("cross_attention: empty clip");
  const std::size_t dk = Wq.rows();
  const std::size_t dv = Wv.rows();
  std::vector<S> q(dk);
  affine<S>(Wq, nullptr, query, std::span<S>(q));
  std::vector<S> keys(clip.size() * dk), values(clip.size() * dv);
  for (std::size_t i = 0; i < clip.size(); ++i) {
    affine<S>(Wk, nullptr, clip.row(i), std::span<S>(keys.data() + i * dk, dk));
    affine<S>(Wv, nullptr, clip.row(i), std::span<S>(values.data() + i * dv, dv));
  }
  std::vector<S> w, ctx;
  attend<S>(keys.data(), values.data(), clip.size(), dk, dv,
            std::span<const S>(q), Wo, out, &w, &ctx);
  if (cache) {
    cache->q = std::move(q);
    cache->keys = std::move(keys);
    cache->values = std::move(values);
    cache->w = std::move(w);
    cache->ctx = std::move(ctx);
    cache->len = clip.size();
  }
}

}  // namespace dacat::nn
