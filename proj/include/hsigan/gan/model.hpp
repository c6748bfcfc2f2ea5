#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "hsigan/tensor/layers.hpp"

namespace hsigan::gan {

/// Discriminator depth as "x+y": x spectral then y spatial convolution blocks.
struct Architecture {
  std::size_t spectral = 3;
  std::size_t spatial = 3;

  static Architecture parse(std::string_view text);
  std::string str() const;
  friend bool operator==(const Architecture&, const Architecture&) = default;
};

struct GanConfig {
  std::size_t n_y = 4;
  std::size_t bands = 16;
  std::size_t w = 9;
  std::size_t k = 24;
  std::size_t noise_dim = 200;
  Architecture arch;

  friend bool operator==(const GanConfig&, const GanConfig&) = default;
};

/// Throws ValidationError describing the first unusable field.
void validate(const GanConfig& cfg);

inline constexpr std::size_t kSpectralKernel = 7;

/// Independent engine per (seed, stream): stream 0 initializes weights, 1 drives training.
std::mt19937_64 seeded_rng(std::uint64_t seed, std::uint32_t stream);

/// Smallest b0 whose generator spectral stack (two stride-2 and one same-padded
/// transposed layer of width 7) yields at least `bands` bands: 4·b0 + 15 ≥ bands.
std::size_t generator_seed_bands(std::size_t bands);

/// Discriminator and generator networks for one configuration.
///
/// Discriminator: x × [spectral conv, BN, lrelu] (first stride 2, unpadded; the
/// rest same-padded), depth merge, y × [3×3 spatial conv, BN, lrelu], dense to
/// 1 + n_y logits.
///
/// Generator: dense noise → 1×1×b0×k, BN, relu; 3 × [spectral tconv, BN, relu];
/// centre band crop; depth merge; (w−1)/2 × [3×3 spatial tconv, BN], relu on
/// hidden layers and tanh on the last; unmerge to w×w×bands×1.
template <typename T>
class GanModel {
 public:
  explicit GanModel(const GanConfig& cfg);

  GanModel(const GanModel&) = delete;
  GanModel& operator=(const GanModel&) = delete;
  GanModel(GanModel&&) = default;
  GanModel& operator=(GanModel&&) = default;

  /// He-normal weights for both networks, drawn discriminator first.
  void initialize(std::mt19937_64& rng);

  const GanConfig& config() const { return cfg_; }
  tensor::Network<T>& discriminator() { return disc_; }
  tensor::Network<T>& generator() { return gen_; }

  tensor::Shape4 cuboid_shape() const { return {cfg_.w, cfg_.w, cfg_.bands, 1}; }
  tensor::Shape4 noise_shape() const { return {1, 1, 1, cfg_.noise_dim}; }
  std::size_t outputs() const { return 1 + cfg_.n_y; }

  /// Discriminator state then generator state, in layer order.
  std::vector<std::span<T>> state();

 private:
  GanConfig cfg_;
  tensor::Network<T> disc_;
  tensor::Network<T> gen_;
};

/// One softmax output: entry 0 is the fake probability, entries 1..n_y the classes.
struct PredictionVec {
  double fake_prob = 0.0;
  std::vector<double> class_probs;

  /// Class id in 1..n_y with the largest probability; ties go to the lowest id.
  std::size_t argmax() const;
};

PredictionVec to_prediction(std::span<const double> logits);

template <typename T>
tensor::Batch<T> sample_noise(std::size_t n, std::size_t dim, std::mt19937_64& rng);

/// Raw 1 + n_y logits per cube.
template <typename T>
std::vector<std::vector<double>> discriminator_logits(GanModel<T>& model,
                                                      const tensor::Batch<T>& cubes,
                                                      tensor::Pass pass);

template <typename T>
std::vector<PredictionVec> discriminator_forward(GanModel<T>& model, const tensor::Batch<T>& cubes,
                                                 tensor::Pass pass = {});

template <typename T>
tensor::Batch<T> generator_forward(GanModel<T>& model, const tensor::Batch<T>& noise,
                                   tensor::Pass pass = {});

extern template class GanModel<float>;
extern template class GanModel<double>;

}  // namespace hsigan::gan
