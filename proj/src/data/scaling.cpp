#include <algorithm>
#include <cmath>

#include "hsigan/data/hsi.hpp"

namespace hsigan::data {

ScaledCube scale_bands(const HsiCube& cube) {
  ScaledCube out{cube, {}};
  const std::size_t B = cube.bands;
  out.scaling.min.assign(B, 0.0f);
  out.scaling.max.assign(B, 0.0f);
  if (cube.pixels() == 0) return out;
  for (std::size_t b = 0; b < B; ++b) {
    float lo = cube.radiance[b];
    float hi = lo;
    for (std::size_t i = 0; i < cube.pixels(); ++i) {
      const float v = cube.radiance[i * B + b];
      if (!std::isfinite(v)) throw NumericError("non-finite radiance in band " + std::to_string(b));
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    out.scaling.min[b] = lo;
    out.scaling.max[b] = hi;
    const double span = static_cast<double>(hi) - lo;
    for (std::size_t i = 0; i < cube.pixels(); ++i) {
      float& v = out.cube.radiance[i * B + b];
      if (span == 0.0) {
        v = 0.0f;
      } else {
        const double s = 2.0 * (static_cast<double>(v) - lo) / span - 1.0;
        v = static_cast<float>(std::clamp(s, -1.0, 1.0));
      }
    }
  }
  return out;
}

HsiCube unscale_bands(const HsiCube& scaled, const BandScaling& scaling) {
  if (scaling.min.size() != scaled.bands || scaling.max.size() != scaled.bands) {
    throw ShapeError("band scaling has " + std::to_string(scaling.min.size()) +
                     " bands, cube has " + std::to_string(scaled.bands));
  }
  HsiCube out = scaled;
  const std::size_t B = scaled.bands;
  for (std::size_t i = 0; i < scaled.pixels(); ++i) {
    for (std::size_t b = 0; b < B; ++b) {
      const double lo = scaling.min[b];
      const double span = static_cast<double>(scaling.max[b]) - lo;
      out.radiance[i * B + b] =
          static_cast<float>(lo + (static_cast<double>(scaled.radiance[i * B + b]) + 1.0) * 0.5 * span);
    }
  }
  return out;
}

}  // namespace hsigan::data
