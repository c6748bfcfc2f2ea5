#include <algorithm>
#include <cmath>
#include <random>

#include "hsigan/data/hsi.hpp"

namespace hsigan::data {

namespace {
constexpr double kBaseline = 0.2;
constexpr double kAmplitude = 0.6;
}  // namespace

std::vector<float> class_spectrum(std::size_t label, std::size_t n_y, std::size_t bands) {
  if (label < 1 || label > n_y) throw ContractError("class id outside 1..n_y");
  const double centre = (static_cast<double>(label) - 0.5) / n_y * (bands - 1.0);
  const double width = std::max(1.0, static_cast<double>(bands) / (2.0 * n_y));
  std::vector<float> s(bands);
  for (std::size_t b = 0; b < bands; ++b) {
    const double d = (static_cast<double>(b) - centre) / width;
    s[b] = static_cast<float>(kBaseline + kAmplitude * std::exp(-0.5 * d * d));
  }
  return s;
}

std::pair<HsiCube, LabelMap> synth_scene(const SynthConfig& cfg) {
  if (cfg.n_y < 2) throw ValidationError("synthetic scene needs at least 2 classes");
  if (cfg.height == 0 || cfg.width == 0 || cfg.bands == 0) {
    throw ValidationError("synthetic scene dimensions must be positive");
  }
  if (cfg.n_y > cfg.height * cfg.width) throw ValidationError("more classes than pixels");
  if (!(cfg.noise_sigma >= 0.0)) throw ValidationError("noise sigma must be >= 0");

  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<std::size_t> pick(0, cfg.height * cfg.width - 1);
  std::vector<std::size_t> sites;
  while (sites.size() < cfg.n_y) {
    const std::size_t s = pick(rng);
    if (std::find(sites.begin(), sites.end(), s) == sites.end()) sites.push_back(s);
  }

  HsiCube cube;
  cube.height = cfg.height;
  cube.width = cfg.width;
  cube.bands = cfg.bands;
  cube.n_y = cfg.n_y;
  cube.radiance.resize(cube.pixels() * cfg.bands);
  LabelMap labels(cfg.height, cfg.width);

  std::vector<std::vector<float>> spectra;
  for (std::size_t c = 1; c <= cfg.n_y; ++c) spectra.push_back(class_spectrum(c, cfg.n_y, cfg.bands));

  std::normal_distribution<double> noise(0.0, 1.0);
  for (std::size_t r = 0; r < cfg.height; ++r) {
    for (std::size_t c = 0; c < cfg.width; ++c) {
      std::size_t best = 0;
      long best_d = -1;
      for (std::size_t k = 0; k < sites.size(); ++k) {
        const long dr = static_cast<long>(r) - static_cast<long>(sites[k] / cfg.width);
        const long dc = static_cast<long>(c) - static_cast<long>(sites[k] % cfg.width);
        const long d = dr * dr + dc * dc;
        if (best_d < 0 || d < best_d) {
          best_d = d;
          best = k;
        }
      }
      labels.at(r, c) = static_cast<std::uint16_t>(best + 1);
      for (std::size_t b = 0; b < cfg.bands; ++b) {
        const double n = cfg.noise_sigma > 0.0 ? cfg.noise_sigma * noise(rng) : 0.0;
        cube.at(r, c, b) = static_cast<float>(spectra[best][b] + n);
      }
    }
  }
  return {std::move(cube), std::move(labels)};
}

}  // namespace hsigan::data
