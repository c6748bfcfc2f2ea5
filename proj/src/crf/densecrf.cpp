#include "hsigan/crf/densecrf.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hsigan::crf {

using data::SoftmaxField;

namespace {

constexpr double kClamp = 1e-12;

// Max-shifted exp(logits) normalized in place.
void normalize_exp(double* v, std::size_t n) {
  const double m = *std::max_element(v, v + n);
  double s = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    v[l] = std::exp(v[l] - m);
    s += v[l];
  }
  for (std::size_t l = 0; l < n; ++l) v[l] /= s;
}

// One synchronous update for `pts.size()` pixels with L labels each.
std::vector<double> step_region(const std::vector<double>& q, const std::vector<double>& unary,
                                const std::vector<FeaturePoint>& pts, std::size_t L,
                                const CrfConfig& cfg) {
  const std::size_t n = pts.size();
  std::vector<double> msg(n * L, 0.0);
  if (cfg.potts_c != 0.0) {
    const double ia = 1.0 / (2.0 * cfg.theta_alpha * cfg.theta_alpha);
    const double ib = 1.0 / (2.0 * cfg.theta_beta * cfg.theta_beta);
    for (std::size_t i = 0; i < n; ++i) {
      const FeaturePoint& a = pts[i];
      double* mi = &msg[i * L];
      const double* qi = &q[i * L];
      for (std::size_t j = i + 1; j < n; ++j) {
        const FeaturePoint& b = pts[j];
        const double dr = a.row - b.row, dc = a.col - b.col;
        const double d0 = a.appearance[0] - b.appearance[0];
        const double d1 = a.appearance[1] - b.appearance[1];
        const double d2 = a.appearance[2] - b.appearance[2];
        const double k = std::exp(-(dr * dr + dc * dc) * ia - (d0 * d0 + d1 * d1 + d2 * d2) * ib);
        double* mj = &msg[j * L];
        const double* qj = &q[j * L];
        for (std::size_t l = 0; l < L; ++l) {
          mi[l] += k * qj[l];
          mj[l] += k * qi[l];
        }
      }
    }
  }
  std::vector<double> out(n * L);
  for (std::size_t i = 0; i < n; ++i) {
    const double* mi = &msg[i * L];
    double total = 0.0;
    for (std::size_t l = 0; l < L; ++l) total += mi[l];
    double* o = &out[i * L];
    for (std::size_t l = 0; l < L; ++l) {
      o[l] = -unary[i * L + l] - cfg.potts_c * (total - mi[l]);
    }
    normalize_exp(o, L);
  }
  return out;
}

void record(MeanfieldResult& r, std::size_t it, double change, double norm) {
  r.max_change[it] = std::max(r.max_change[it], change);
  r.normalization_error[it] = std::max(r.normalization_error[it], norm);
}

}  // namespace

void validate(const CrfConfig& cfg) {
  if (!(cfg.potts_c >= 0.0) || !std::isfinite(cfg.potts_c)) {
    throw ValidationError("potts_c must be finite and >= 0");
  }
  if (!(cfg.theta_alpha > 0.0) || !(cfg.theta_beta > 0.0)) {
    throw ValidationError("kernel bandwidths must be > 0");
  }
  if (cfg.tile == 0 || 2 * cfg.overlap >= cfg.tile) {
    throw ValidationError("tile must exceed twice the overlap");
  }
}

UnaryField build_unary(const SoftmaxField& field) {
  if (field.channels < 3) {
    throw ContractError("CRF needs at least 2 classes (field has " +
                        std::to_string(field.channels) + " channels including the fake entry)");
  }
  UnaryField u;
  u.height = field.height;
  u.width = field.width;
  u.n_y = field.channels - 1;
  u.costs.resize(field.pixels() * u.n_y);
  for (std::size_t i = 0; i < field.pixels(); ++i) {
    const auto v = field.at(i);
    double s = 0.0;
    for (std::size_t l = 1; l < v.size(); ++l) s += v[l];
    for (std::size_t l = 0; l < u.n_y; ++l) {
      const double p = s > 0.0 ? v[l + 1] / s : 1.0 / static_cast<double>(u.n_y);
      u.costs[i * u.n_y + l] = -std::log(std::max(p, kClamp));
    }
  }
  return u;
}

FeaturePoint feature_at(const data::PixelFeatures& feats, std::size_t pixel) {
  return {static_cast<double>(pixel / feats.width), static_cast<double>(pixel % feats.width),
          feats.appearance.at(pixel)};
}

double pairwise_kernel(const FeaturePoint& i, const FeaturePoint& j, const CrfConfig& cfg) {
  const double dr = i.row - j.row, dc = i.col - j.col;
  double da = 0.0;
  for (std::size_t k = 0; k < 3; ++k) {
    const double d = i.appearance[k] - j.appearance[k];
    da += d * d;
  }
  return std::exp(-(dr * dr + dc * dc) / (2.0 * cfg.theta_alpha * cfg.theta_alpha) -
                  da / (2.0 * cfg.theta_beta * cfg.theta_beta));
}

double compatibility(std::size_t a, std::size_t b, const CrfConfig& cfg) {
  return a == b ? 0.0 : cfg.potts_c;
}

SoftmaxField initial_marginals(const UnaryField& unary) {
  SoftmaxField q(unary.height, unary.width, unary.n_y);
  for (std::size_t i = 0; i < unary.pixels(); ++i) {
    double* o = q.values.data() + i * unary.n_y;
    for (std::size_t l = 0; l < unary.n_y; ++l) o[l] = -unary.at(i)[l];
    normalize_exp(o, unary.n_y);
  }
  return q;
}

SoftmaxField meanfield_step(const SoftmaxField& q, const UnaryField& unary,
                            const data::PixelFeatures& feats, const CrfConfig& cfg) {
  if (q.height != unary.height || q.width != unary.width || q.channels != unary.n_y) {
    throw ShapeError("marginals and unary field disagree");
  }
  if (feats.height != q.height || feats.width != q.width) {
    throw ShapeError("pixel features and field disagree");
  }
  std::vector<FeaturePoint> pts(q.pixels());
  for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = feature_at(feats, i);
  SoftmaxField out(q.height, q.width, q.channels);
  out.values = step_region(q.values, unary.costs, pts, q.channels, cfg);
  return out;
}

MeanfieldResult meanfield_infer(const SoftmaxField& field, const data::PixelFeatures& feats,
                                const CrfConfig& cfg) {
  validate(cfg);
  const UnaryField unary = build_unary(field);
  if (feats.height != field.height || feats.width != field.width) {
    throw ShapeError("pixel features are " + std::to_string(feats.height) + "x" +
                     std::to_string(feats.width) + ", field is " + std::to_string(field.height) +
                     "x" + std::to_string(field.width));
  }
  const std::size_t L = unary.n_y;
  MeanfieldResult r;
  r.q = initial_marginals(unary);
  r.max_change.assign(cfg.iterations, 0.0);
  r.normalization_error.assign(cfg.iterations, 0.0);

  const std::size_t H = field.height, W = field.width;
  const bool tiled = H > cfg.tile || W > cfg.tile;
  const std::size_t core = tiled ? cfg.tile - 2 * cfg.overlap : std::max(H, W);
  const std::size_t margin = tiled ? cfg.overlap : 0;
  SoftmaxField result = r.q;

  for (std::size_t r0 = 0; r0 < H; r0 += core) {
    for (std::size_t c0 = 0; c0 < W; c0 += core) {
      const std::size_t r1 = std::min(H, r0 + core), c1 = std::min(W, c0 + core);
      const std::size_t tr0 = r0 > margin ? r0 - margin : 0, tc0 = c0 > margin ? c0 - margin : 0;
      const std::size_t tr1 = std::min(H, r1 + margin), tc1 = std::min(W, c1 + margin);

      std::vector<std::size_t> index;
      for (std::size_t y = tr0; y < tr1; ++y)
        for (std::size_t x = tc0; x < tc1; ++x) index.push_back(y * W + x);
      std::vector<FeaturePoint> pts;
      std::vector<double> q, u;
      for (std::size_t p : index) {
        pts.push_back(feature_at(feats, p));
        q.insert(q.end(), r.q.values.begin() + p * L, r.q.values.begin() + (p + 1) * L);
        u.insert(u.end(), unary.at(p), unary.at(p) + L);
      }
      for (std::size_t it = 0; it < cfg.iterations; ++it) {
        std::vector<double> next = step_region(q, u, pts, L, cfg);
        double change = 0.0, norm = 0.0;
        for (std::size_t k = 0; k < index.size(); ++k) {
          double s = 0.0;
          for (std::size_t l = 0; l < L; ++l) {
            change = std::max(change, std::abs(next[k * L + l] - q[k * L + l]));
            s += next[k * L + l];
          }
          norm = std::max(norm, std::abs(s - 1.0));
        }
        record(r, it, change, norm);
        q = std::move(next);
      }
      for (std::size_t k = 0; k < index.size(); ++k) {
        const std::size_t y = index[k] / W, x = index[k] % W;
        if (y < r0 || y >= r1 || x < c0 || x >= c1) continue;
        std::copy(q.begin() + k * L, q.begin() + (k + 1) * L,
                  result.values.begin() + index[k] * L);
      }
    }
  }
  r.q = std::move(result);
  return r;
}

data::LabelMap map_decode(const SoftmaxField& q) { return data::argmax_map(q, 0); }

}  // namespace hsigan::crf
