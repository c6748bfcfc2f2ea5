#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "hsigan/data/hsi.hpp"

namespace hsigan::data {

/// Per-pixel probability vectors, row-major (row, col, channel).
///
/// A GAN field has 1 + n_y channels (entry 0 = fake); a CRF marginal field has n_y.
struct SoftmaxField {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 0;
  std::vector<double> values;

  SoftmaxField() = default;
  SoftmaxField(std::size_t h, std::size_t w, std::size_t c)
      : height(h), width(w), channels(c), values(h * w * c, 0.0) {}

  std::size_t pixels() const { return height * width; }
  std::span<double> at(std::size_t pixel) { return {values.data() + pixel * channels, channels}; }
  std::span<const double> at(std::size_t pixel) const {
    return {values.data() + pixel * channels, channels};
  }
};

/// Argmax over entries [first, channels) per pixel, reported as 1-based class ids
/// (first = 1 for GAN fields, 0 for CRF marginals). Ties go to the lowest id.
LabelMap argmax_map(const SoftmaxField& field, std::size_t first);

// SFP1 container: magic, u32 H, W, C, f32 little-endian payload.
std::vector<std::uint8_t> encode_sfp(const SoftmaxField& field);
SoftmaxField decode_sfp(std::span<const std::uint8_t> bytes);
void save_sfp(const std::filesystem::path& path, const SoftmaxField& field);
SoftmaxField load_sfp(const std::filesystem::path& path);

}  // namespace hsigan::data
