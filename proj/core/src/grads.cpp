#include "dacat/grads.hpp"

#include <cmath>
#include <stdexcept>

namespace dacat::nn {

void affine_backward(const Tensor& W, std::span<const double> x,
                     std::span<const double> dy, Tensor* dW, Tensor* db,
                     std::span<double> dx) {
  const std::size_t R = W.rows(), C = W.cols();
  if (x.size() != C || dy.size() != R)
    throw std::invalid_argument("affine_backward: shape mismatch");
  if (dW) {
    for (std::size_t r = 0; r < R; ++r) {
      double* wr = dW->v.data() + r * C;
      const double g = dy[r];
      for (std::size_t c = 0; c < C; ++c) wr[c] += g * x[c];
    }
  }
  if (db)
    for (std::size_t r = 0; r < R; ++r) (*db)(r) += dy[r];
  if (!dx.empty()) {
    for (std::size_t r = 0; r < R; ++r) {
      const double g = dy[r];
      const double* wr = W.row(r);
      for (std::size_t c = 0; c < C; ++c) dx[c] += g * wr[c];
    }
  }
}

void encode_backward(const Tensor& W, std::span<const double> x,
                     std::span<const double> y, std::span<const double> dy,
                     Tensor* dW, Tensor* db, std::span<double> dx) {
  std::vector<double> dz(dy.size());
  for (std::size_t i = 0; i < dy.size(); ++i) dz[i] = dy[i] * (1.0 - y[i] * y[i]);
  affine_backward(W, x, dz, dW, db, dx);
}

void lstm_backward(const Tensor& Wih, const Tensor& Whh, const LSTMCache& cache,
                   std::span<const double> dh, std::span<const double> dc,
                   Tensor* dWih, Tensor* dWhh, Tensor* db,
                   std::span<double> dx, std::span<double> dh_prev,
                   std::span<double> dc_prev) {
  const std::size_t H = cache.c_prev.size();
  const auto& g = cache.gates;  // i, f, g, o
  std::vector<double> dpre(4 * H);
  for (std::size_t j = 0; j < H; ++j) {
    const double i_g = g[j], f_g = g[H + j], g_g = g[2 * H + j], o_g = g[3 * H + j];
    const double th = cache.tanh_c[j];
    const double dct = dc[j] + dh[j] * o_g * (1.0 - th * th);
    const double dog = dh[j] * th;
    dpre[j] = dct * g_g * i_g * (1.0 - i_g);
    dpre[H + j] = dct * cache.c_prev[j] * f_g * (1.0 - f_g);
    dpre[2 * H + j] = dct * i_g * (1.0 - g_g * g_g);
    dpre[3 * H + j] = dog * o_g * (1.0 - o_g);
    if (!dc_prev.empty()) dc_prev[j] += dct * f_g;
  }
  affine_backward(Wih, cache.x, dpre, dWih, db, dx);
  affine_backward(Whh, cache.h_prev, dpre, dWhh, nullptr, dh_prev);
}

void cross_entropy_backward(std::span<const double> logits, int target,
                            double scale, std::span<double> dlogits) {
  if (target < 0 || static_cast<std::size_t>(target) >= logits.size())
    throw std::invalid_argument("cross_entropy_backward: target out of range");
  double m = logits[0];
  for (double v : logits) m = v > m ? v : m;
  double sum = 0;
  for (double v : logits) sum += std::exp(v - m);
  for (std::size_t k = 0; k < logits.size(); ++k) {
    const double p = std::exp(logits[k] - m) / sum;
    dlogits[k] += scale * (p - (static_cast<int>(k) == target ? 1.0 : 0.0));
  }
}

void mean_pool_backward(std::span<const double> dout, std::size_t clip_len,
                        std::span<double> dclip) {
  const double inv = 1.0 / static_cast<double>(clip_len);
  for (std::size_t i = 0; i < clip_len; ++i)
    for (std::size_t j = 0; j < dout.size(); ++j)
      dclip[i * dout.size() + j] += dout[j] * inv;
}

void cross_attention_backward(const Tensor& Wq, const Tensor& Wk, const Tensor& Wv,
                              const Tensor& Wo, std::span<const double> query,
                              ClipView clip, const CACache& cache,
                              std::span<const double> dout, Tensor* dWq,
                              Tensor* dWk, Tensor* dWv, Tensor* dWo,
                              std::span<double> dquery, std::span<double> dclip) {
  const std::size_t dk = Wq.rows();
  const std::size_t dv = Wv.rows();
  const std::size_t len = cache.len;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dk));

  // out = Wo ctx
  std::vector<double> dctx(dv, 0.0);
  affine_backward(Wo, cache.ctx, dout, dWo, nullptr, dctx);

  // ctx = sum_i w_i V_i
  std::vector<double> dw(len, 0.0);
  for (std::size_t i = 0; i < len; ++i)
    dw[i] = maxr::detail::dot(dctx.data(), cache.values.data() + i * dv, dv);

  // softmax jacobian: ds_i = w_i (dw_i - sum_j w_j dw_j)
  double mix = 0;
  for (std::size_t i = 0; i < len; ++i) mix += cache.w[i] * dw[i];

  std::vector<double> dq(dk, 0.0);
  std::vector<double> dk_row(dk), dv_row(dv);
  for (std::size_t i = 0; i < len; ++i) {
    const double ds = cache.w[i] * (dw[i] - mix) * scale;
    const double* key = cache.keys.data() + i * dk;
    for (std::size_t j = 0; j < dk; ++j) {
      dq[j] += ds * key[j];
      dk_row[j] = ds * cache.q[j];
    }
    for (std::size_t j = 0; j < dv; ++j) dv_row[j] = cache.w[i] * dctx[j];
    std::span<double> dclip_i =
        dclip.empty() ? std::span<double>()
                      : dclip.subspan(i * clip.dim(), clip.dim());
    affine_backward(Wk, clip.row(i), dk_row, dWk, nullptr, dclip_i);
    affine_backward(Wv, clip.row(i), dv_row, dWv, nullptr, dclip_i);
  }
  affine_backward(Wq, query, dq, dWq, nullptr, dquery);
}

void concat_project(const Tensor& W, const Tensor& bias, std::span<const double> a,
                    std::span<const double> b, std::span<double> y) {
  std::vector<double> cat(a.size() + b.size());
  std::copy(a.begin(), a.end(), cat.begin());
  std::copy(b.begin(), b.end(), cat.begin() + a.size());
  affine<double>(W, &bias, cat, y);
}

void concat_project_backward(const Tensor& W, std::span<const double> a,
                             std::span<const double> b, std::span<const double> dy,
                             Tensor* dW, Tensor* dbias, std::span<double> da,
                             std::span<double> db) {
  std::vector<double> cat(a.size() + b.size());
  std::copy(a.begin(), a.end(), cat.begin());
  std::copy(b.begin(), b.end(), cat.begin() + a.size());
  std::vector<double> dcat(cat.size(), 0.0);
  affine_backward(W, cat, dy, dW, dbias, dcat);
  if (!da.empty())
    for (std::size_t i = 0; i < a.size(); ++i) da[i] += dcat[i];
  if (!db.empty())
    for (std::size_t i = 0; i < b.size(); ++i) db[i] += dcat[a.size() + i];
}

}  // namespace dacat::nn
