#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hsigan/gan/model.hpp"

namespace hsigan::gan {

/// Lower bound applied to every probability before taking its logarithm.
inline constexpr double kLogClamp = 1e-12;

/// Mean −log p(true class); labels are 1-based.
double loss_sup(const std::vector<PredictionVec>& preds, const std::vector<std::size_t>& labels);
/// Mean −log(1 − fake_prob) over real cubes.
double loss_d1(const std::vector<PredictionVec>& real);
/// Mean −log(fake_prob) over synthetic cubes.
double loss_d2(const std::vector<PredictionVec>& fake);
/// Mean −log(1 − fake_prob) over synthetic cubes.
double loss_g(const std::vector<PredictionVec>& fake);

// Per-sample terms and their gradients with respect to the 1 + n_y logits.
// A term whose probability hit the clamp contributes zero gradient.

struct Term {
  double value = 0.0;
  std::vector<double> grad;
};

/// −log p_label.
Term class_term(std::span<const double> logits, std::size_t label);
/// −log(1 − p_0), with 1 − p_0 summed over the class entries.
Term real_term(std::span<const double> logits);
/// −log p_0.
Term fake_term(std::span<const double> logits);

}  // namespace hsigan::gan
