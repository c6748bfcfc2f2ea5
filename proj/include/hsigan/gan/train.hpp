#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "hsigan/gan/model.hpp"
#include "hsigan/tensor/adam.hpp"

namespace hsigan::gan {

struct SemiLoss {
  double sup = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  /// Accumulated per sample, independently of the three terms above.
  double semi = 0.0;
};

struct LossRecord {
  std::size_t step = 0;
  double sup = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  double semi = 0.0;
  double g = 0.0;
};

/// Discriminator objective on one labeled, one synthetic and an optional
/// unlabeled batch. Each batch is a separate forward pass; only the labeled pass
/// may update BN running statistics. Unlabeled cubes add to the d1 mean only.
/// With `backward`, gradients are accumulated into the discriminator.
template <typename T>
SemiLoss semi_loss(GanModel<T>& model, const tensor::Batch<T>& labeled,
                   const std::vector<std::size_t>& labels, const tensor::Batch<T>& synthetic,
                   const tensor::Batch<T>* unlabeled, tensor::Pass pass, bool backward);

/// Generator objective for one noise batch. With `backward`, gradients flow
/// through the discriminator (its parameter gradients untouched) into the
/// generator.
template <typename T>
double generator_loss(GanModel<T>& model, const tensor::Batch<T>& noise, tensor::Pass pass,
                      bool backward);

struct TrainConfig {
  double lr = 0.0007;
  std::size_t batch = 50;
  std::size_t epochs = 30;
  /// Noise draws averaged per generator update.
  std::size_t noise_samples = 1;
  bool use_unlabeled = true;
  std::uint64_t seed = 7;
  /// Epoch interval between checkpoint callbacks; 0 disables them.
  std::size_t checkpoint_every = 0;
};

void validate(const TrainConfig& cfg);

/// Alternating optimizer for one model: Adam on each network, one RNG for
/// noise and shuffling.
class Trainer {
 public:
  Trainer(GanModel<float>& model, const TrainConfig& cfg);

  /// −∇θ_D L_SEMI update on the given batches.
  SemiLoss discriminator_step(const tensor::Batch<float>& labeled,
                              const std::vector<std::size_t>& labels,
                              const tensor::Batch<float>& synthetic,
                              const tensor::Batch<float>* unlabeled);
  /// −∇θ_G L_G update with fresh noise, averaged over noise_samples draws.
  double generator_step(std::size_t batch);
  /// Synthetic batch from fresh noise, then both updates.
  LossRecord train_step(const tensor::Batch<float>& labeled, const std::vector<std::size_t>& labels,
                        const tensor::Batch<float>* unlabeled);

  tensor::AdamState<float>& disc_adam() { return disc_adam_; }
  tensor::AdamState<float>& gen_adam() { return gen_adam_; }
  std::mt19937_64& rng() { return rng_; }
  std::size_t steps() const { return steps_; }

 private:
  GanModel<float>& model_;
  TrainConfig cfg_;
  tensor::AdamState<float> disc_adam_;
  tensor::AdamState<float> gen_adam_;
  std::mt19937_64 rng_;
  std::size_t steps_ = 0;
};

struct TrainingData {
  tensor::Batch<float> labeled;
  std::vector<std::size_t> labels;
  tensor::Batch<float> unlabeled;
};

struct FitResult {
  std::vector<LossRecord> history;
};

/// Runs cfg.epochs × max(1, m_l / batch) train steps over a labeled pool
/// reshuffled every epoch. `on_checkpoint(epoch)` fires every
/// cfg.checkpoint_every epochs.
FitResult fit(GanModel<float>& model, const TrainingData& data, const TrainConfig& cfg,
              const std::function<void(std::size_t)>& on_checkpoint = {});

}  // namespace hsigan::gan
