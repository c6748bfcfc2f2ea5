#include "hsigan/gan/losses.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "hsigan/tensor/ops.hpp"

namespace hsigan::gan {

namespace {

double neg_log(double p) { return -std::log(std::max(p, kLogClamp)); }

double real_mass(const PredictionVec& p) {
  return std::accumulate(p.class_probs.begin(), p.class_probs.end(), 0.0);
}

template <typename F>
double mean_of(const std::vector<PredictionVec>& preds, F term) {
  if (preds.empty()) throw ContractError("loss over an empty batch");
  double s = 0.0;
  for (const auto& p : preds) s += term(p);
  return s / static_cast<double>(preds.size());
}

void check_label(std::size_t label, std::size_t n_y) {
  if (label < 1 || label > n_y) {
    throw ContractError("label " + std::to_string(label) + " outside 1.." + std::to_string(n_y));
  }
}

}  // namespace

double loss_sup(const std::vector<PredictionVec>& preds, const std::vector<std::size_t>& labels) {
  if (preds.size() != labels.size()) throw ContractError("one label per prediction required");
  if (preds.empty()) throw ContractError("loss over an empty batch");
  double s = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    check_label(labels[i], preds[i].class_probs.size());
    s += neg_log(preds[i].class_probs[labels[i] - 1]);
  }
  return s / static_cast<double>(preds.size());
}

double loss_d1(const std::vector<PredictionVec>& real) {
  return mean_of(real, [](const PredictionVec& p) { return neg_log(real_mass(p)); });
}

double loss_d2(const std::vector<PredictionVec>& fake) {
  return mean_of(fake, [](const PredictionVec& p) { return neg_log(p.fake_prob); });
}

double loss_g(const std::vector<PredictionVec>& fake) { return loss_d1(fake); }

Term class_term(std::span<const double> logits, std::size_t label) {
  check_label(label, logits.size() - 1);
  const auto p = tensor::softmax<double>(logits);
  Term t{neg_log(p[label]), std::vector<double>(p.size(), 0.0)};
  if (p[label] >= kLogClamp) {
    t.grad = p;
    t.grad[label] -= 1.0;
  }
  return t;
}

Term real_term(std::span<const double> logits) {
  const auto p = tensor::softmax<double>(logits);
  const double s = std::accumulate(p.begin() + 1, p.end(), 0.0);
  Term t{neg_log(s), std::vector<double>(p.size(), 0.0)};
  if (s >= kLogClamp) {
    t.grad[0] = p[0];
    for (std::size_t j = 1; j < p.size(); ++j) t.grad[j] = -p[j] * p[0] / s;
  }
  return t;
}

Term fake_term(std::span<const double> logits) {
  const auto p = tensor::softmax<double>(logits);
  Term t{neg_log(p[0]), std::vector<double>(p.size(), 0.0)};
  if (p[0] >= kLogClamp) {
    t.grad = p;
    t.grad[0] -= 1.0;
  }
  return t;
}

}  // namespace hsigan::gan
