#include "hsigan/eval/metrics.hpp"

#include <numeric>

#include "json.hpp"

#include "hsigan/errors.hpp"

namespace hsigan::eval {

std::uint64_t ConfusionMatrix::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

ConfusionMatrix confusion(const data::LabelMap& truth, const data::LabelMap& pred,
                          std::size_t n_y) {
  if (truth.height != pred.height || truth.width != pred.width) {
    throw ShapeError("truth map is " + std::to_string(truth.height) + "x" +
                     std::to_string(truth.width) + " but prediction is " +
                     std::to_string(pred.height) + "x" + std::to_string(pred.width));
  }
  ConfusionMatrix cm(n_y);
  for (std::size_t i = 0; i < truth.labels.size(); ++i) {
    const std::size_t t = truth.labels[i];
    if (t == 0) continue;
    const std::size_t p = pred.labels[i];
    if (t > n_y) throw ContractError("truth label " + std::to_string(t) + " exceeds n_y");
    if (p == 0 || p > n_y) {
      throw ContractError("prediction " + std::to_string(p) + " at pixel " + std::to_string(i) +
                          " is not a class in [1, " + std::to_string(n_y) + "]");
    }
    ++cm.at(t - 1, p - 1);
  }
  return cm;
}

MetricsReport metrics(const ConfusionMatrix& cm) {
  const std::size_t n = cm.n_y;
  const std::uint64_t total = cm.total();
  if (total == 0) throw ContractError("confusion matrix is empty");
  std::vector<std::uint64_t> rows(n, 0), cols(n, 0);
  std::uint64_t trace = 0;
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t p = 0; p < n; ++p) {
      rows[t] += cm.at(t, p);
      cols[p] += cm.at(t, p);
    }
    trace += cm.at(t, t);
  }
  MetricsReport r;
  r.evaluated = total;
  r.per_class.resize(n);
  double sum = 0.0;
  std::size_t present = 0;
  for (std::size_t t = 0; t < n; ++t) {
    if (rows[t] == 0) continue;
    r.per_class[t] = static_cast<double>(cm.at(t, t)) / static_cast<double>(rows[t]);
    sum += *r.per_class[t];
    ++present;
  }
  r.aa = sum / static_cast<double>(present);
  r.oa = static_cast<double>(trace) / static_cast<double>(total);

  using wide = std::int64_t;  // exact for N up to ~3e9 pixels
  wide chance = 0;
  for (std::size_t c = 0; c < n; ++c) {
    chance += static_cast<wide>(rows[c]) * static_cast<wide>(cols[c]);
  }
  const wide num = static_cast<wide>(total) * static_cast<wide>(trace) - chance;
  const wide den = static_cast<wide>(total) * static_cast<wide>(total) - chance;
  // den == 0 only when truth and prediction are both one and the same class.
  r.kappa = den == 0 ? 1.0 : static_cast<double>(num) / static_cast<double>(den);
  return r;
}

std::string metrics_json(const MetricsReport& report) {
  nlohmann::ordered_json j;
  j["oa"] = report.oa;
  j["aa"] = report.aa;
  j["kappa"] = report.kappa;
  auto per = nlohmann::ordered_json::array();
  for (const auto& v : report.per_class) {
    if (v) per.push_back(*v);
    else per.push_back(nullptr);
  }
  j["per_class"] = std::move(per);
  j["evaluated"] = report.evaluated;
  return j.dump(2) + "\n";
}

}  // namespace hsigan::eval
