#include "dacat/adamw.hpp"

#include <cmath>
#include <stdexcept>

namespace dacat::nn {

void AdamW::step(ParamSet& params, const GradSet& grads) {
  ++step_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_));
  for (auto& [name, g] : grads) {
    auto pit = params.find(name);
    if (pit == params.end())
      throw std::invalid_argument("AdamW: gradient for unknown parameter " + name);
    Tensor& w = pit->second;
    if (!g.same_shape(w))
      throw std::invalid_argument("AdamW: gradient shape mismatch for " + name);
    if (!g.all_finite())
      throw std::invalid_argument("AdamW: non-finite gradient for " + name);

    auto mit = m_.find(name);
    if (mit == m_.end()) {
      Tensor zero = w;
      zero.fill(0.0);
      mit = m_.emplace(name, zero).first;
      v_.emplace(name, std::move(zero));
    }
    Tensor& m = mit->second;
    Tensor& v = v_.at(name);

    for (std::size_t i = 0; i < w.numel(); ++i) {
      m.v[i] = cfg_.beta1 * m.v[i] + (1.0 - cfg_.beta1) * g.v[i];
      v.v[i] = cfg_.beta2 * v.v[i] + (1.0 - cfg_.beta2) * g.v[i] * g.v[i];
      const double m_hat = m.v[i] / bc1;
      const double v_hat = v.v[i] / bc2;
      const double w_old = w.v[i];
      w.v[i] = w_old - cfg_.lr * m_hat / (std::sqrt(v_hat) + cfg_.eps)
                     - cfg_.lr * cfg_.weight_decay * w_old;
    }
  }
}

}  // namespace dacat::nn
