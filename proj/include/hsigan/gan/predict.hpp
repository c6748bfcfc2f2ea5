#pragma once

#include "hsigan/data/field.hpp"
#include "hsigan/data/hsi.hpp"
#include "hsigan/gan/model.hpp"

namespace hsigan::gan {

/// Discriminator softmax (1 + n_y entries) for the mirror-padded cuboid centred
/// on every pixel, in inference mode.
data::SoftmaxField predict_field(GanModel<float>& model, const data::HsiCube& cube);

/// Same, for the listed pixel indices only; row i of the result is pixels[i].
std::vector<PredictionVec> predict_pixels(GanModel<float>& model, const data::HsiCube& cube,
                                          const std::vector<std::size_t>& pixels);

}  // namespace hsigan::gan
