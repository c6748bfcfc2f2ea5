#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "hsigan/data/hsi.hpp"

namespace hsigan::eval {

using Rgb = std::array<std::uint8_t, 3>;

/// Background (black) followed by 16 class colours.
extern const std::array<Rgb, 17> kPalette;

/// Binary PPM: "P6\n{W} {H}\n255\n" then one RGB triple per pixel, row-major.
std::vector<std::uint8_t> render_map(const data::LabelMap& map);

}  // namespace hsigan::eval
