#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "hsigan/tensor/tensor.hpp"

namespace hsigan::data {

/// Hyperspectral image, band-interleaved-by-pixel: radiance[(row * width + col) * bands + b].
struct HsiCube {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t bands = 0;
  std::size_t n_y = 0;
  std::vector<float> radiance;
  /// Wavelength range in nm, informational only; not stored in HSC files.
  std::optional<std::pair<double, double>> band_range;

  std::size_t pixels() const { return height * width; }
  float& at(std::size_t row, std::size_t col, std::size_t b) {
    return radiance[(row * width + col) * bands + b];
  }
  float at(std::size_t row, std::size_t col, std::size_t b) const {
    return radiance[(row * width + col) * bands + b];
  }
};

/// Per-pixel class ids: 0 = background/unannotated, 1..n_y = classes.
struct LabelMap {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<std::uint16_t> labels;

  LabelMap() = default;
  LabelMap(std::size_t h, std::size_t w) : height(h), width(w), labels(h * w, 0) {}

  std::size_t pixels() const { return height * width; }
  std::uint16_t& at(std::size_t row, std::size_t col) { return labels[row * width + col]; }
  std::uint16_t at(std::size_t row, std::size_t col) const { return labels[row * width + col]; }

  friend bool operator==(const LabelMap&, const LabelMap&) = default;
};

// HSC container -------------------------------------------------------------

struct HscContents {
  HsiCube cube;
  std::optional<LabelMap> labels;
};

/// Throws FormatError on bad magic/version or truncation, ValidationError on
/// a label id above n_y.
HscContents load_hsc(const std::filesystem::path& path);
void save_hsc(const std::filesystem::path& path, const HsiCube& cube, const LabelMap* labels);

std::vector<std::uint8_t> encode_hsc(const HsiCube& cube, const LabelMap* labels);
HscContents decode_hsc(std::span<const std::uint8_t> bytes);

/// Label maps alone are stored as HSC files with zero bands.
void save_label_map(const std::filesystem::path& path, const LabelMap& labels, std::size_t n_y);
LabelMap load_label_map(const std::filesystem::path& path);

// Scaling -------------------------------------------------------------------

struct BandScaling {
  std::vector<float> min;
  std::vector<float> max;
};

struct ScaledCube {
  HsiCube cube;
  BandScaling scaling;
};

/// Per-band min-max scaling to [-1, 1]; a constant band maps to 0.
ScaledCube scale_bands(const HsiCube& cube);
HsiCube unscale_bands(const HsiCube& scaled, const BandScaling& scaling);

// Sampling ------------------------------------------------------------------

struct SplitSpec {
  std::size_t labeled_count = 100;
  std::size_t unlabeled_count = 0;
  std::uint64_t seed = 7;
  std::size_t min_per_class = 2;
};

/// Pixel indices (row * width + col), each list in draw order.
struct Split {
  std::vector<std::size_t> labeled;
  std::vector<std::size_t> unlabeled;
  std::vector<std::size_t> test;
};

/// Labeled pixels: min_per_class per class first, the rest uniformly from the
/// remaining annotated pixels. Unlabeled pixels: uniformly from every pixel not
/// drawn as labeled. Test: annotated pixels in neither group, ascending.
Split sample_split(const LabelMap& labels, std::size_t n_y, const SplitSpec& spec);

/// Reflect-101 mirror index into [0, n).
std::size_t mirror_index(long i, std::size_t n);

/// w×w×bands×1 window centred on (row, col), mirror-padded at the borders.
tensor::Tensor4<float> extract_cuboid(const HsiCube& cube, std::size_t row, std::size_t col,
                                      std::size_t w);

struct CuboidSet {
  tensor::Batch<float> cubes;
  std::vector<std::size_t> labels;  // empty for unlabeled sets
};

CuboidSet extract_cuboids(const HsiCube& cube, const LabelMap* labels,
                          const std::vector<std::size_t>& pixels, std::size_t w);

// PCA -----------------------------------------------------------------------

/// Standardized projections of every pixel onto the top three principal axes.
struct PixelFeatures {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<std::array<double, 3>> appearance;
  /// bands × 3, column-major: projection[b + bands * k] is loading b of component k.
  std::vector<double> projection;
  std::array<double, 3> eigenvalues{};
};

PixelFeatures pca3(const HsiCube& cube);

// Synthetic scene -----------------------------------------------------------

struct SynthConfig {
  std::size_t height = 32;
  std::size_t width = 32;
  std::size_t bands = 16;
  std::size_t n_y = 4;
  double noise_sigma = 0.05;
  std::uint64_t seed = 7;
};

/// Noise-free spectrum of class `label` (1-based): a Gaussian bump on a flat baseline.
std::vector<float> class_spectrum(std::size_t label, std::size_t n_y, std::size_t bands);

/// Voronoi partition around n_y distinct seeded sites; every pixel labeled.
std::pair<HsiCube, LabelMap> synth_scene(const SynthConfig& cfg);

}  // namespace hsigan::data
