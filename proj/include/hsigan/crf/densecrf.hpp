#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "hsigan/data/field.hpp"
#include "hsigan/data/hsi.hpp"

namespace hsigan::crf {

/// Fully connected Potts CRF with one bilateral Gaussian kernel.
///
/// The pairwise energy sums over ordered pairs (i, j), j ≠ i, so every
/// unordered pair is counted twice; potts_c is defined under that convention.
struct CrfConfig {
  double potts_c = 3.0;
  double theta_alpha = 5.0;  // pixels
  double theta_beta = 0.5;   // standardized PCA units
  std::size_t iterations = 10;
  /// Images larger than `tile` on either side are solved in overlapping tiles.
  std::size_t tile = 96;
  std::size_t overlap = 16;
};

void validate(const CrfConfig& cfg);

/// −log of the renormalized class probabilities, clamped at 1e−12.
struct UnaryField {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t n_y = 0;
  std::vector<double> costs;

  std::size_t pixels() const { return height * width; }
  const double* at(std::size_t pixel) const { return costs.data() + pixel * n_y; }
};

/// Drops the fake entry of a 1 + n_y field and renormalizes before taking −log.
UnaryField build_unary(const data::SoftmaxField& field);

struct FeaturePoint {
  double row = 0.0;
  double col = 0.0;
  std::array<double, 3> appearance{};
};

FeaturePoint feature_at(const data::PixelFeatures& feats, std::size_t pixel);

/// exp(−‖l_i − l_j‖²/2θ_α² − ‖x_i − x_j‖²/2θ_β²).
double pairwise_kernel(const FeaturePoint& i, const FeaturePoint& j, const CrfConfig& cfg);

/// Potts: 0 for equal labels, potts_c otherwise.
double compatibility(std::size_t a, std::size_t b, const CrfConfig& cfg);

/// normalize(exp(−unary)) per pixel.
data::SoftmaxField initial_marginals(const UnaryField& unary);

/// One synchronous mean-field update over the whole grid (no tiling):
/// q'_i(l) ∝ exp(−u_i(l) − Σ_{l′≠l} c · Σ_{j≠i} K(i,j) q_j(l′)).
data::SoftmaxField meanfield_step(const data::SoftmaxField& q, const UnaryField& unary,
                                  const data::PixelFeatures& feats, const CrfConfig& cfg);

struct MeanfieldResult {
  data::SoftmaxField q;
  /// Per iteration: largest absolute marginal change, and largest |Σ_l q_i(l) − 1|.
  std::vector<double> max_change;
  std::vector<double> normalization_error;
};

/// q₀ from the GAN field, then cfg.iterations steps, tile by tile when the image
/// exceeds cfg.tile (each tile keeps only its centre, margins of cfg.overlap).
MeanfieldResult meanfield_infer(const data::SoftmaxField& field, const data::PixelFeatures& feats,
                                const CrfConfig& cfg);

/// Per-pixel argmax of the marginals as 1-based labels; ties go to the lowest id.
data::LabelMap map_decode(const data::SoftmaxField& q);

}  // namespace hsigan::crf
