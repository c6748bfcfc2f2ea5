#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hsigan/data/hsi.hpp"

namespace hsigan::eval {

/// Rows are truth, columns prediction; class l occupies index l − 1.
struct ConfusionMatrix {
  std::size_t n_y = 0;
  std::vector<std::uint64_t> counts;

  explicit ConfusionMatrix(std::size_t n = 0) : n_y(n), counts(n * n, 0) {}
  std::uint64_t& at(std::size_t truth, std::size_t pred) { return counts[truth * n_y + pred]; }
  std::uint64_t at(std::size_t truth, std::size_t pred) const { return counts[truth * n_y + pred]; }
  std::uint64_t total() const;
};

/// Tallies every pixel whose truth label is nonzero. Predictions outside
/// [1, n_y] on such pixels, and truth labels above n_y, are contract errors.
ConfusionMatrix confusion(const data::LabelMap& truth, const data::LabelMap& pred,
                          std::size_t n_y);

struct MetricsReport {
  /// Recall per class; empty for classes absent from the truth.
  std::vector<std::optional<double>> per_class;
  double oa = 0.0;
  double aa = 0.0;
  double kappa = 0.0;
  std::uint64_t evaluated = 0;
};

/// Kappa is evaluated as (N·trace − Σ r·c)/(N² − Σ r·c) in integers, so the
/// only rounding is the final division.
MetricsReport metrics(const ConfusionMatrix& cm);

/// {"oa", "aa", "kappa", "per_class": [... null for absent ...], "evaluated"},
/// two-space indented with a trailing newline.
std::string metrics_json(const MetricsReport& report);

}  // namespace hsigan::eval
