#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dacat {

// Dense row-major tensor of rank 1 or 2. Small by design: the model zoo
// here is vectors and weight matrices, nothing deeper.
template <class S>
struct TensorT {
  std::vector<std::size_t> shape;
  std::vector<S> v;

  TensorT() = default;

  static TensorT vec(std::size_t n) {
    TensorT t;
    t.shape = {n};
    t.v.assign(n, S(0));
    return t;
  }

  static TensorT mat(std::size_t rows, std::size_t cols) {
    TensorT t;
    t.shape = {rows, cols};
    t.v.assign(rows * cols, S(0));
    return t;
  }

  std::size_t numel() const { return v.size(); }
  std::size_t rank() const { return shape.size(); }
  std::size_t rows() const { return shape.at(0); }
  std::size_t cols() const { return shape.at(1); }

  S& operator()(std::size_t i) { return v[i]; }
  S operator()(std::size_t i) const { return v[i]; }
  S& operator()(std::size_t r, std::size_t c) { return v[r * shape[1] + c]; }
  S operator()(std::size_t r, std::size_t c) const { return v[r * shape[1] + c]; }

  const S* row(std::size_t r) const { return v.data() + r * shape[1]; }

  void fill(S x) { std::fill(v.begin(), v.end(), x); }

  bool same_shape(const TensorT& o) const { return shape == o.shape; }

  bool all_finite() const {
    for (S x : v)
      if (!std::isfinite(static_cast<double>(x))) return false;
    return true;
  }
};

using Tensor = TensorT<double>;

// Named tensors, ordered by name so that iteration, serialization and
// optimizer updates are deterministic.
template <class S>
using NamedTensorsT = std::map<std::string, TensorT<S>>;

// Model parameters (weights and biases).
using ParamSet = NamedTensorsT<double>;
// Accumulated gradients, shape-congruent with the ParamSet they belong to.
using GradSet = NamedTensorsT<double>;

template <class S>
TensorT<S> tensor_cast(const Tensor& t) {
  TensorT<S> out;
  out.shape = t.shape;
  out.v.resize(t.v.size());
  for (std::size_t i = 0; i < t.v.size(); ++i) out.v[i] = static_cast<S>(t.v[i]);
  return out;
}

template <class S>
NamedTensorsT<S> params_cast(const ParamSet& p) {
  NamedTensorsT<S> out;
  for (const auto& [name, t] : p) out.emplace(name, tensor_cast<S>(t));
  return out;
}

inline const Tensor& param(const ParamSet& p, const std::string& name) {
  auto it = p.find(name);
  if (it == p.end()) throw std::invalid_argument("missing parameter: " + name);
  return it->second;
}

template <class S>
const TensorT<S>& param(const NamedTensorsT<S>& p, const std::string& name) {
  auto it = p.find(name);
  if (it == p.end()) throw std::invalid_argument("missing parameter: " + name);
  return it->second;
}

inline bool params_equal(const ParamSet& a, const ParamSet& b) {
  if (a.size() != b.size()) return false;
  for (auto ita = a.begin(), itb = b.begin(); ita != a.end(); ++ita, ++itb) {
    if (ita->first != itb->first) return false;
    if (ita->second.shape != itb->second.shape) return false;
    if (ita->second.v != itb->second.v) return false;
  }
  return true;
}

}  // namespace dacat
