#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hsigan/errors.hpp"

namespace hsigan::tensor {

/// Extents of a (height, width, bands, channels) tensor. Channels vary fastest.
struct Shape4 {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t bands = 0;
  std::size_t channels = 0;

  constexpr std::size_t size() const { return height * width * bands * channels; }
  friend constexpr bool operator==(const Shape4&, const Shape4&) = default;
};

std::string to_string(const Shape4& s);

/// Dense row-major 4-D tensor in (height, width, bands, channels) order.
///
/// A "depth-merged" tensor has bands == 1 and carries the old bands×channels
/// product in its channel axis. Because channels vary fastest the merge is a
/// pure reshape: the flat payload is identical.
template <typename T>
class Tensor4 {
 public:
  Tensor4() = default;

  explicit Tensor4(Shape4 shape, T fill = T{0}) : shape_(shape), data_(shape.size(), fill) {}

  Tensor4(Shape4 shape, std::vector<T> data) : shape_(shape), data_(std::move(data)) {
    if (data_.size() != shape_.size()) {
      throw ShapeError("tensor payload has " + std::to_string(data_.size()) +
                       " entries, shape " + to_string(shape_) + " needs " +
                       std::to_string(shape_.size()));
    }
  }

  const Shape4& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }

  std::size_t offset(std::size_t h, std::size_t w, std::size_t b, std::size_t c) const {
    return ((h * shape_.width + w) * shape_.bands + b) * shape_.channels + c;
  }

  T& operator()(std::size_t h, std::size_t w, std::size_t b, std::size_t c) {
    return data_[offset(h, w, b, c)];
  }
  const T& operator()(std::size_t h, std::size_t w, std::size_t b, std::size_t c) const {
    return data_[offset(h, w, b, c)];
  }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }

  /// Same payload viewed under a new shape of equal element count.
  Tensor4 reshaped(Shape4 shape) const& { return Tensor4(shape, data_); }
  Tensor4 reshaped(Shape4 shape) && { return Tensor4(shape, std::move(data_)); }

  bool all_finite() const {
    for (const T& v : data_) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }

  friend bool operator==(const Tensor4&, const Tensor4&) = default;

 private:
  Shape4 shape_{};
  std::vector<T> data_;
};

/// A minibatch: one tensor per sample, all of the same shape.
template <typename T>
using Batch = std::vector<Tensor4<T>>;

/// Shape shared by every sample; throws ShapeError on an empty or ragged batch.
template <typename T>
Shape4 batch_shape(const Batch<T>& batch) {
  if (batch.empty()) throw ShapeError("empty batch");
  const Shape4 s = batch.front().shape();
  for (const auto& t : batch) {
    if (t.shape() != s) {
      throw ShapeError("ragged batch: " + to_string(s) + " vs " + to_string(t.shape()));
    }
  }
  return s;
}

template <typename T, typename U>
Tensor4<T> cast(const Tensor4<U>& src) {
  std::vector<T> out(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) out[i] = static_cast<T>(src.data()[i]);
  return Tensor4<T>(src.shape(), std::move(out));
}

}  // namespace hsigan::tensor
