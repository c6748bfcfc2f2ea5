#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace hsigan::tensor {

/// A trainable buffer paired with its gradient accumulator.
template <typename T>
struct ParamSlot {
  std::span<T> value;
  std::span<T> grad;
};

template <typename T>
struct AdamState {
  std::vector<T> first_moment;
  std::vector<T> second_moment;
  std::uint64_t step_count = 0;
  double lr = 0.0007;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Bias-corrected Adam update over every slot, in slot order.
///
/// Moment buffers are sized on the first call and must match on every later
/// one. Any non-finite gradient throws NumericError before a single parameter
/// is touched.
template <typename T>
void adam_step(std::span<const ParamSlot<T>> slots, AdamState<T>& state);

template <typename T>
std::size_t parameter_count(std::span<const ParamSlot<T>> slots) {
  std::size_t n = 0;
  for (const auto& s : slots) n += s.value.size();
  return n;
}

}  // namespace hsigan::tensor
