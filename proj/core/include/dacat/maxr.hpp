#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "dacat/feature_cache.hpp"

namespace dacat::maxr {

// Result of one adaptive read-out: per-frame responses S, clip responses P
// (suffix sums of S) and the selected 1-based start index. Among equal
// clip responses the smallest index wins, i.e. the longest clip.
template <class S>
struct ClipSelectionT {
  std::vector<S> response;       // S[i-1] = <query, f_i>
  std::vector<S> clip_response;  // P[j-1] = sum_{i=j..t} S[i]
  std::size_t start_index = 1;   // 1-based
};

using ClipSelection = ClipSelectionT<double>;

namespace detail {

// Dot product with four independent accumulators. The summation order is
// fixed by this code, so results are reproducible run to run and machine
// to machine at the same precision.
template <class S>
inline S dot(const S* a, const S* b, std::size_t n) {
  S s0 = 0, s1 = 0, s2 = 0, s3 = 0;
  const std::size_t blocks = n / 4;
  for (std::size_t k = 0; k < blocks; ++k) {
    const S* pa = a + 4 * k;
    const S* pb = b + 4 * k;
    s0 += pa[0] * pb[0];
    s1 += pa[1] * pb[1];
    s2 += pa[2] * pb[2];
    s3 += pa[3] * pb[3];
  }
  for (std::size_t i = 4 * blocks; i < n; ++i) s0 += a[i] * b[i];
  return ((s0 + s1) + (s2 + s3));
}

}  // namespace detail

// Raw dot-product response between the query and every cached frame.
// Deliberately unnormalized: a larger product means a stronger response.
template <class S>
std::vector<S> frame_response(std::span<const S> query,
                              const BasicFeatureCache<S>& cache) {
  if (cache.empty()) throw std::invalid_argument("frame_response: empty cache");
  if (query.size() != cache.dim())
    throw std::invalid_argument("frame_response: query dimension mismatch");
  for (S x : query)
    if (!std::isfinite(static_cast<double>(x)))
      throw std::invalid_argument("frame_response: non-finite query");
  const std::size_t t = cache.size();
  const std::size_t d = cache.dim();
  std::vector<S> out(t);
  const S* base = cache.data();
  for (std::size_t i = 0; i < t; ++i)
    out[i] = detail::dot(query.data(), base + i * d, d);
  return out;
}

// Suffix sums: P[j] = S[j] + S[j+1] + ... + S[t]. One reverse pass.
template <class S>
std::vector<S> suffix_sum(std::span<const S> response) {
  if (response.empty()) throw std::invalid_argument("suffix_sum: empty input");
  std::vector<S> p(response.size());
  S acc = 0;
  for (std::size_t i = response.size(); i-- > 0;) {
    acc += response[i];
    p[i] = acc;
  }
  return p;
}

// Smallest 1-based index maximizing the clip response. NaN is rejected,
// never propagated into a selection.
template <class S>
std::size_t select_start(std::span<const S> clip_response) {
  if (clip_response.empty()) throw std::invalid_argument("select_start: empty input");
  std::size_t best = 0;
  for (std::size_t j = 0; j < clip_response.size(); ++j) {
    if (std::isnan(static_cast<double>(clip_response[j])))
      throw std::invalid_argument("select_start: NaN in clip response");
    if (clip_response[j] > clip_response[best]) best = j;
  }
  return best + 1;
}

// Full adaptive read-out: the cache suffix whose summed response to the
// query is maximal. The clip always ends at the newest entry.
template <class S>
std::pair<ClipViewT<S>, ClipSelectionT<S>> read_adaptive(
    std::span<const S> query, const BasicFeatureCache<S>& cache) {
  ClipSelectionT<S> sel;
  sel.response = frame_response(query, cache);
  sel.clip_response = suffix_sum<S>(sel.response);
  sel.start_index = select_start<S>(sel.clip_response);
  return {cache.slice(sel.start_index), std::move(sel)};
}

// Last min(k, t) entries; the fixed-window ablation read-out.
template <class S>
ClipViewT<S> read_fixed(const BasicFeatureCache<S>& cache, std::size_t k) {
  if (cache.empty()) throw std::invalid_argument("read_fixed: empty cache");
  if (k < 1) throw std::invalid_argument("read_fixed: k must be >= 1");
  const std::size_t t = cache.size();
  const std::size_t start = k >= t ? 1 : t - k + 1;
  return cache.slice(start);
}

// Whole history; identical to read_fixed with k = t.
template <class S>
ClipViewT<S> read_all(const BasicFeatureCache<S>& cache) {
  if (cache.empty()) throw std::invalid_argument("read_all: empty cache");
  return cache.slice(1);
}

}  // namespace dacat::maxr
