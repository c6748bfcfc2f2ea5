#include "hsigan/gan/predict.hpp"

#include <algorithm>

namespace hsigan::gan {

namespace {
constexpr std::size_t kChunk = 64;
}

std::vector<PredictionVec> predict_pixels(GanModel<float>& model, const data::HsiCube& cube,
                                          const std::vector<std::size_t>& pixels) {
  if (cube.bands != model.config().bands) {
    throw ShapeError("model expects " + std::to_string(model.config().bands) +
                     " bands, cube has " + std::to_string(cube.bands));
  }
  std::vector<PredictionVec> out;
  out.reserve(pixels.size());
  for (std::size_t start = 0; start < pixels.size(); start += kChunk) {
    const std::vector<std::size_t> chunk(
        pixels.begin() + static_cast<long>(start),
        pixels.begin() + static_cast<long>(std::min(pixels.size(), start + kChunk)));
    const auto set = data::extract_cuboids(cube, nullptr, chunk, model.config().w);
    for (auto& p : discriminator_forward(model, set.cubes, {tensor::Mode::infer})) {
      out.push_back(std::move(p));
    }
  }
  return out;
}

data::SoftmaxField predict_field(GanModel<float>& model, const data::HsiCube& cube) {
  std::vector<std::size_t> all(cube.pixels());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const auto preds = predict_pixels(model, cube, all);
  data::SoftmaxField field(cube.height, cube.width, model.outputs());
  for (std::size_t i = 0; i < preds.size(); ++i) {
    auto v = field.at(i);
    v[0] = preds[i].fake_prob;
    std::copy(preds[i].class_probs.begin(), preds[i].class_probs.end(), v.begin() + 1);
  }
  return field;
}

}  // namespace hsigan::gan
