#include "hsigan/tensor/adam.hpp"

#include <cmath>
#include <string>

#include "hsigan/errors.hpp"

namespace hsigan::tensor {

template <typename T>
void adam_step(std::span<const ParamSlot<T>> slots, AdamState<T>& state) {
  const std::size_t total = parameter_count(slots);
  for (const auto& s : slots) {
    if (s.grad.size() != s.value.size()) throw ContractError("gradient not aligned with params");
    for (const T g : s.grad) {
      if (!std::isfinite(g)) throw NumericError("non-finite gradient, Adam update aborted");
    }
  }
  if (state.first_moment.empty() && state.second_moment.empty()) {
    state.first_moment.assign(total, T{0});
    state.second_moment.assign(total, T{0});
  }
  if (state.first_moment.size() != total || state.second_moment.size() != total) {
    throw ContractError("Adam moment buffers hold " + std::to_string(state.first_moment.size()) +
                        " entries for " + std::to_string(total) + " parameters");
  }

  ++state.step_count;
  const double t = static_cast<double>(state.step_count);
  const double correction1 = 1.0 - std::pow(state.beta1, t);
  const double correction2 = 1.0 - std::pow(state.beta2, t);
  const T b1 = static_cast<T>(state.beta1);
  const T b2 = static_cast<T>(state.beta2);

  std::size_t k = 0;
  for (const auto& s : slots) {
    for (std::size_t i = 0; i < s.value.size(); ++i, ++k) {
      const T g = s.grad[i];
      T& m = state.first_moment[k];
      T& v = state.second_moment[k];
      m = b1 * m + (T{1} - b1) * g;
      v = b2 * v + (T{1} - b2) * g * g;
      const double m_hat = m / correction1;
      const double v_hat = v / correction2;
      s.value[i] -= static_cast<T>(state.lr * m_hat / (std::sqrt(v_hat) + state.epsilon));
    }
  }
}

template void adam_step(std::span<const ParamSlot<float>>, AdamState<float>&);
template void adam_step(std::span<const ParamSlot<double>>, AdamState<double>&);

}  // namespace hsigan::tensor
