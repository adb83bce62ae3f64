#pragma once

#include <cmath>
#include <cstring>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace dacat {

// Read-only view of a run of consecutive cache entries. Rows stay
// contiguous in the parent cache; nothing is copied.
template <class S>
class ClipViewT {
 public:
  ClipViewT() = default;
  ClipViewT(const S* data, std::size_t len, std::size_t dim)
      : data_(data), len_(len), dim_(dim) {}

  std::size_t size() const { return len_; }
  std::size_t dim() const { return dim_; }
  bool empty() const { return len_ == 0; }

  std::span<const S> row(std::size_t i) const {
    return std::span<const S>(data_ + i * dim_, dim_);
  }
  const S* data() const { return data_; }

 private:
  const S* data_ = nullptr;
  std::size_t len_ = 0;
  std::size_t dim_ = 0;
};

using ClipView = ClipViewT<double>;

// Append-only store of pooled frame features since stream start. Entries
// live in one flat row-major buffer so the response scan walks memory
// sequentially. An optional capacity turns it into a sliding window; that
// is a deployment extension, the default is unbounded growth.
template <class S>
class BasicFeatureCache {
 public:
  explicit BasicFeatureCache(std::size_t dim,
                             std::optional<std::size_t> capacity = std::nullopt)
      : dim_(dim), capacity_(capacity) {
    if (dim_ < 1) throw std::invalid_argument("FeatureCache: dim must be >= 1");
    if (capacity_ && *capacity_ < 1)
      throw std::invalid_argument("FeatureCache: capacity must be >= 1");
  }

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return len_; }
  bool empty() const { return len_ == 0; }
  std::optional<std::size_t> capacity() const { return capacity_; }

  // Appends one feature; evicts the oldest entry when a capacity is set
  // and reached. Rejects wrong dimensions and non-finite values.
  void append(std::span<const S> f) {
    if (f.size() != dim_)
      throw std::invalid_argument("FeatureCache: dimension mismatch on append");
    for (S x : f)
      if (!std::isfinite(static_cast<double>(x)))
        throw std::invalid_argument("FeatureCache: non-finite feature rejected");
    if (capacity_ && len_ == *capacity_) {
      std::memmove(buf_.data(), buf_.data() + dim_, (len_ - 1) * dim_ * sizeof(S));
      std::memcpy(buf_.data() + (len_ - 1) * dim_, f.data(), dim_ * sizeof(S));
    } else {
      buf_.insert(buf_.end(), f.begin(), f.end());
      ++len_;
    }
  }

  std::span<const S> entry(std::size_t i) const {
    if (i >= len_) throw std::out_of_range("FeatureCache: entry index out of range");
    return std::span<const S>(buf_.data() + i * dim_, dim_);
  }

  std::span<const S> back() const { return entry(len_ - 1); }

  // Entries start..size(), 1-based start to match the stream convention.
  ClipViewT<S> slice(std::size_t start_1based) const {
    if (start_1based < 1 || start_1based > len_)
      throw std::out_of_range("FeatureCache: slice start out of range [1, len]");
    const std::size_t s = start_1based - 1;
    return ClipViewT<S>(buf_.data() + s * dim_, len_ - s, dim_);
  }

  ClipViewT<S> all() const { return ClipViewT<S>(buf_.data(), len_, dim_); }

  const S* data() const { return buf_.data(); }

  void clear() {
    buf_.clear();
    len_ = 0;
  }

 private:
  std::size_t dim_;
  std::optional<std::size_t> capacity_;
  std::size_t len_ = 0;
  std::vector<S> buf_;
};

using FeatureCache = BasicFeatureCache<double>;

}  // namespace dacat
