#pragma once

#include <span>
#include <vector>

#include "dacat/ops.hpp"
#include "dacat/tensor.hpp"

// Reverse-mode companions of the forward kernels in ops.hpp. Training runs
// in double precision only; every function here accumulates (+=) into the
// gradient buffers it is given, so callers zero them per step. Null output
// pointers mean "not wanted".
namespace dacat::nn {

// y = W x (+ b)
void affine_backward(const Tensor& W, std::span<const double> x,
                     std::span<const double> dy, Tensor* dW, Tensor* db,
                     std::span<double> dx);

// y = tanh(W x + b); `y` is the forward output.
void encode_backward(const Tensor& W, std::span<const double> x,
                     std::span<const double> y, std::span<const double> dy,
                     Tensor* dW, Tensor* db, std::span<double> dx);

// One LSTM step. dh/dc are the incoming gradients at the step's outputs;
// dh_prev/dc_prev receive the gradients flowing to the previous step.
void lstm_backward(const Tensor& Wih, const Tensor& Whh, const LSTMCache& cache,
                   std::span<const double> dh, std::span<const double> dc,
                   Tensor* dWih, Tensor* dWhh, Tensor* db,
                   std::span<double> dx, std::span<double> dh_prev,
                   std::span<double> dc_prev);

// loss = cross_entropy(logits, target); dlogits = scale * (softmax - onehot).
void cross_entropy_backward(std::span<const double> logits, int target,
                            double scale, std::span<double> dlogits);

// out = mean over clip rows; dclip is row-major len x dim.
void mean_pool_backward(std::span<const double> dout, std::size_t clip_len,
                        std::span<double> dclip);

// Cross-attention backward. dquery accumulates the query gradient;
// dclip (row-major, may be empty) the gradient into the clip features,
// which training never needs because cached features are frozen.
void cross_attention_backward(const Tensor& Wq, const Tensor& Wk, const Tensor& Wv,
                              const Tensor& Wo, std::span<const double> query,
                              ClipView clip, const CACache& cache,
                              std::span<const double> dout, Tensor* dWq,
                              Tensor* dWk, Tensor* dWv, Tensor* dWo,
                              std::span<double> dquery, std::span<double> dclip);

// y = W [a; b] + bias  (the concat interaction)
void concat_project(const Tensor& W, const Tensor& bias, std::span<const double> a,
                    std::span<const double> b, std::span<double> y);

void concat_project_backward(const Tensor& W, std::span<const double> a,
                             std::span<const double> b, std::span<const double> dy,
                             Tensor* dW, Tensor* dbias, std::span<double> da,
                             std::span<double> db);

}  // namespace dacat::nn
