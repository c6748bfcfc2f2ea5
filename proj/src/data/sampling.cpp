#include <algorithm>
#include <random>
#include <string>

#include "hsigan/data/hsi.hpp"

namespace hsigan::data {

Split sample_split(const LabelMap& labels, std::size_t n_y, const SplitSpec& spec) {
  if (labels.labels.size() != labels.pixels()) throw ShapeError("label map payload size mismatch");
  if (spec.labeled_count < n_y * spec.min_per_class) {
    throw ValidationError("labeled count " + std::to_string(spec.labeled_count) +
                          " is below n_y * min_per_class = " +
                          std::to_string(n_y * spec.min_per_class));
  }
  std::vector<std::vector<std::size_t>> by_class(n_y + 1);
  std::size_t annotated = 0;
  for (std::size_t i = 0; i < labels.pixels(); ++i) {
    const std::size_t l = labels.labels[i];
    if (l == 0) continue;
    if (l > n_y) {
      throw ValidationError("label " + std::to_string(l) + " at pixel (row " +
                            std::to_string(i / labels.width) + ", col " +
                            std::to_string(i % labels.width) + ") exceeds n_y");
    }
    by_class[l].push_back(i);
    ++annotated;
  }
  std::string short_classes;
  for (std::size_t c = 1; c <= n_y; ++c) {
    if (by_class[c].size() < spec.min_per_class) {
      short_classes += (short_classes.empty() ? "" : ", ") + std::to_string(c) + " (" +
                       std::to_string(by_class[c].size()) + " pixels)";
    }
  }
  if (!short_classes.empty()) {
    throw ContractError("classes below the per-class floor of " +
                        std::to_string(spec.min_per_class) + ": " + short_classes);
  }
  if (spec.labeled_count > annotated) {
    throw ValidationError("labeled count " + std::to_string(spec.labeled_count) + " exceeds the " +
                          std::to_string(annotated) + " annotated pixels");
  }
  if (spec.labeled_count + spec.unlabeled_count > labels.pixels()) {
    throw ValidationError("labeled + unlabeled count exceeds the image size");
  }

  std::mt19937_64 rng(spec.seed);
  std::vector<char> taken(labels.pixels(), 0);
  Split split;
  std::vector<std::size_t> rest;
  for (std::size_t c = 1; c <= n_y; ++c) {
    auto& pool = by_class[c];
    std::shuffle(pool.begin(), pool.end(), rng);
    for (std::size_t k = 0; k < pool.size(); ++k) {
      if (k < spec.min_per_class) {
        split.labeled.push_back(pool[k]);
        taken[pool[k]] = 1;
      } else {
        rest.push_back(pool[k]);
      }
    }
  }
  std::sort(rest.begin(), rest.end());
  std::shuffle(rest.begin(), rest.end(), rng);
  for (std::size_t k = 0; split.labeled.size() < spec.labeled_count; ++k) {
    split.labeled.push_back(rest[k]);
    taken[rest[k]] = 1;
  }

  std::vector<std::size_t> free;
  for (std::size_t i = 0; i < labels.pixels(); ++i) {
    if (!taken[i]) free.push_back(i);
  }
  std::shuffle(free.begin(), free.end(), rng);
  for (std::size_t k = 0; k < spec.unlabeled_count; ++k) {
    split.unlabeled.push_back(free[k]);
    taken[free[k]] = 1;
  }
  for (std::size_t i = 0; i < labels.pixels(); ++i) {
    if (labels.labels[i] != 0 && !taken[i]) split.test.push_back(i);
  }
  return split;
}

std::size_t mirror_index(long i, std::size_t n) {
  if (n == 0) throw ShapeError("mirror index into an empty axis");
  if (n == 1) return 0;
  const long period = 2 * (static_cast<long>(n) - 1);
  long m = i % period;
  if (m < 0) m += period;
  return static_cast<std::size_t>(m < static_cast<long>(n) ? m : period - m);
}

tensor::Tensor4<float> extract_cuboid(const HsiCube& cube, std::size_t row, std::size_t col,
                                      std::size_t w) {
  if (w % 2 == 0) throw ContractError("cuboid width must be odd, got " + std::to_string(w));
  if (row >= cube.height || col >= cube.width) throw ShapeError("cuboid centre outside the image");
  const long half = static_cast<long>(w / 2);
  tensor::Tensor4<float> out({w, w, cube.bands, 1});
  for (std::size_t dy = 0; dy < w; ++dy) {
    const std::size_t r = mirror_index(static_cast<long>(row) + static_cast<long>(dy) - half,
                                       cube.height);
    for (std::size_t dx = 0; dx < w; ++dx) {
      const std::size_t c = mirror_index(static_cast<long>(col) + static_cast<long>(dx) - half,
                                         cube.width);
      const float* src = &cube.radiance[(r * cube.width + c) * cube.bands];
      std::copy(src, src + cube.bands, &out(dy, dx, 0, 0));
    }
  }
  return out;
}

CuboidSet extract_cuboids(const HsiCube& cube, const LabelMap* labels,
                          const std::vector<std::size_t>& pixels, std::size_t w) {
  CuboidSet set;
  set.cubes.reserve(pixels.size());
  for (std::size_t p : pixels) {
    set.cubes.push_back(extract_cuboid(cube, p / cube.width, p % cube.width, w));
    if (labels) set.labels.push_back(labels->labels.at(p));
  }
  return set;
}

}  // namespace hsigan::data
