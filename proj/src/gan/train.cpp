#include "hsigan/gan/train.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "hsigan/gan/losses.hpp"

namespace hsigan::gan {

using tensor::Batch;
using tensor::Mode;
using tensor::Pass;

namespace {

template <typename T>
tensor::Tensor4<T> grad_tensor(const std::vector<double>& g, double scale) {
  tensor::Tensor4<T> t({1, 1, 1, g.size()});
  for (std::size_t j = 0; j < g.size(); ++j) t.data()[j] = static_cast<T>(g[j] * scale);
  return t;
}

}  // namespace

template <typename T>
SemiLoss semi_loss(GanModel<T>& model, const Batch<T>& labeled,
                   const std::vector<std::size_t>& labels, const Batch<T>& synthetic,
                   const Batch<T>* unlabeled, Pass pass, bool backward) {
  if (labeled.empty()) throw ContractError("semi-supervised loss needs a labeled batch");
  if (labels.size() != labeled.size()) throw ContractError("one label per labeled cube required");
  if (synthetic.empty()) throw ContractError("semi-supervised loss needs a synthetic batch");
  if (unlabeled && unlabeled->empty()) unlabeled = nullptr;

  const double m_l = static_cast<double>(labeled.size());
  const double m_real = m_l + (unlabeled ? static_cast<double>(unlabeled->size()) : 0.0);
  const double m_f = static_cast<double>(synthetic.size());
  const Pass untracked{pass.mode, false};
  SemiLoss loss;

  {
    const auto logits = discriminator_logits(model, labeled, pass);
    Batch<T> grads;
    for (std::size_t i = 0; i < logits.size(); ++i) {
      const Term sup = class_term(logits[i], labels[i]);
      const Term real = real_term(logits[i]);
      loss.sup += sup.value;
      loss.d1 += real.value;
      loss.semi += sup.value / m_l + real.value / m_real;
      if (backward) {
        std::vector<double> g(sup.grad.size());
        for (std::size_t j = 0; j < g.size(); ++j) g[j] = sup.grad[j] / m_l + real.grad[j] / m_real;
        grads.push_back(grad_tensor<T>(g, 1.0));
      }
    }
    if (backward) model.discriminator().backward(grads, true);
  }
  if (unlabeled) {
    const auto logits = discriminator_logits(model, *unlabeled, untracked);
    Batch<T> grads;
    for (const auto& l : logits) {
      const Term real = real_term(l);
      loss.d1 += real.value;
      loss.semi += real.value / m_real;
      if (backward) grads.push_back(grad_tensor<T>(real.grad, 1.0 / m_real));
    }
    if (backward) model.discriminator().backward(grads, true);
  }
  {
    const auto logits = discriminator_logits(model, synthetic, untracked);
    Batch<T> grads;
    for (const auto& l : logits) {
      const Term fake = fake_term(l);
      loss.d2 += fake.value;
      loss.semi += fake.value / m_f;
      if (backward) grads.push_back(grad_tensor<T>(fake.grad, 1.0 / m_f));
    }
    if (backward) model.discriminator().backward(grads, true);
  }
  loss.sup /= m_l;
  loss.d1 /= m_real;
  loss.d2 /= m_f;
  return loss;
}

template <typename T>
double generator_loss(GanModel<T>& model, const Batch<T>& noise, Pass pass, bool backward,
                      double grad_scale) {
  const Batch<T> fake = generator_forward(model, noise, pass);
  const auto logits = discriminator_logits(model, fake, Pass{pass.mode, false});
  const double m = static_cast<double>(noise.size());
  double loss = 0.0;
  Batch<T> grads;
  for (const auto& l : logits) {
    const Term t = real_term(l);
    loss += t.value;
    if (backward) grads.push_back(grad_tensor<T>(t.grad, grad_scale / m));
  }
  if (backward) {
    const Batch<T> grad_fake = model.discriminator().backward(grads, false);
    model.generator().backward(grad_fake, true);
  }
  return loss / m;
}

template <typename T>
double generator_loss(GanModel<T>& model, const Batch<T>& noise, Pass pass, bool backward) {
  return generator_loss(model, noise, pass, backward, 1.0);
}

void validate(const TrainConfig& cfg) {
  if (!(cfg.lr >= 0.0)) throw ValidationError("learning rate must be >= 0");
  if (cfg.batch < 2) throw ValidationError("batch size must be at least 2 (batch normalization)");
  if (cfg.noise_samples == 0) throw ValidationError("noise_samples must be at least 1");
}

Trainer::Trainer(GanModel<float>& model, const TrainConfig& cfg)
    : model_(model), cfg_(cfg), rng_(seeded_rng(cfg.seed, 1)) {
  validate(cfg);
  disc_adam_.lr = static_cast<float>(cfg.lr);
  gen_adam_.lr = static_cast<float>(cfg.lr);
}

SemiLoss Trainer::discriminator_step(const Batch<float>& labeled,
                                     const std::vector<std::size_t>& labels,
                                     const Batch<float>& synthetic, const Batch<float>* unlabeled) {
  model_.discriminator().zero_grad();
  model_.generator().zero_grad();
  const SemiLoss loss =
      semi_loss(model_, labeled, labels, synthetic, unlabeled, Pass{Mode::train, true}, true);
  const auto params = model_.discriminator().parameters();
  tensor::adam_step<float>(params, disc_adam_);
  return loss;
}

double Trainer::generator_step(std::size_t batch) {
  model_.discriminator().zero_grad();
  model_.generator().zero_grad();
  const double scale = 1.0 / static_cast<double>(cfg_.noise_samples);
  double loss = 0.0;
  for (std::size_t s = 0; s < cfg_.noise_samples; ++s) {
    const auto noise = sample_noise<float>(batch, model_.config().noise_dim, rng_);
    loss += scale * generator_loss(model_, noise, Pass{Mode::train, true}, true, scale);
  }
  const auto params = model_.generator().parameters();
  tensor::adam_step<float>(params, gen_adam_);
  return loss;
}

LossRecord Trainer::train_step(const Batch<float>& labeled, const std::vector<std::size_t>& labels,
                               const Batch<float>* unlabeled) {
  if (labeled.empty()) throw ContractError("train step needs a non-empty labeled batch");
  const auto noise = sample_noise<float>(labeled.size(), model_.config().noise_dim, rng_);
  const Batch<float> synthetic = generator_forward(model_, noise, Pass{Mode::train, false});
  const SemiLoss d = discriminator_step(labeled, labels, synthetic, unlabeled);
  const double g = generator_step(labeled.size());
  return LossRecord{steps_++, d.sup, d.d1, d.d2, d.semi, g};
}

FitResult fit(GanModel<float>& model, const TrainingData& data, const TrainConfig& cfg,
              const std::function<void(std::size_t)>& on_checkpoint) {
  validate(cfg);
  FitResult result;
  if (cfg.epochs == 0) return result;
  if (data.labeled.empty()) throw ContractError("labeled pool is empty");
  if (data.labels.size() != data.labeled.size()) {
    throw ContractError("one label per labeled cube required");
  }
  Trainer trainer(model, cfg);
  const std::size_t m_l = data.labeled.size();
  const std::size_t batch = std::min(cfg.batch, m_l);
  if (batch < 2) throw ContractError("labeled pool needs at least 2 cubes");
  const std::size_t steps_per_epoch = std::max<std::size_t>(1, m_l / batch);
  const bool unlabeled_on = cfg.use_unlabeled && !data.unlabeled.empty();

  std::vector<std::size_t> order(m_l);
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::size_t> u_order(data.unlabeled.size());
  std::iota(u_order.begin(), u_order.end(), 0);
  std::size_t u_pos = u_order.size();

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), trainer.rng());
    for (std::size_t s = 0; s < steps_per_epoch; ++s) {
      Batch<float> x;
      std::vector<std::size_t> y;
      for (std::size_t i = s * batch; i < (s + 1) * batch; ++i) {
        x.push_back(data.labeled[order[i]]);
        y.push_back(data.labels[order[i]]);
      }
      Batch<float> u;
      if (unlabeled_on) {
        for (std::size_t i = 0; i < batch; ++i) {
          if (u_pos == u_order.size()) {
            std::shuffle(u_order.begin(), u_order.end(), trainer.rng());
            u_pos = 0;
          }
          u.push_back(data.unlabeled[u_order[u_pos++]]);
        }
      }
      result.history.push_back(trainer.train_step(x, y, unlabeled_on ? &u : nullptr));
    }
    if (cfg.checkpoint_every > 0 && (epoch + 1) % cfg.checkpoint_every == 0 && on_checkpoint) {
      on_checkpoint(epoch + 1);
    }
  }
  return result;
}

template SemiLoss semi_loss<float>(GanModel<float>&, const Batch<float>&,
                                   const std::vector<std::size_t>&, const Batch<float>&,
                                   const Batch<float>*, Pass, bool);
template SemiLoss semi_loss<double>(GanModel<double>&, const Batch<double>&,
                                    const std::vector<std::size_t>&, const Batch<double>&,
                                    const Batch<double>*, Pass, bool);
template double generator_loss<float>(GanModel<float>&, const Batch<float>&, Pass, bool);
template double generator_loss<double>(GanModel<double>&, const Batch<double>&, Pass, bool);

}  // namespace hsigan::gan
