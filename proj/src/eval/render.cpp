#include "hsigan/eval/render.hpp"

#include <string>

#include "hsigan/errors.hpp"

namespace hsigan::eval {

const std::array<Rgb, 17> kPalette = {{
    {0, 0, 0},
    {230, 25, 75},
    {60, 180, 75},
    {255, 225, 25},
    {0, 130, 200},
    {245, 130, 48},
    {145, 30, 180},
    {70, 240, 240},
    {240, 50, 230},
    {210, 245, 60},
    {250, 190, 212},
    {0, 128, 128},
    {220, 190, 255},
    {170, 110, 40},
    {255, 250, 200},
    {128, 0, 0},
    {170, 255, 195},
}};

std::vector<std::uint8_t> render_map(const data::LabelMap& map) {
  const std::string header =
      "P6\n" + std::to_string(map.width) + " " + std::to_string(map.height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(header.size() + 3 * map.labels.size());
  for (std::size_t i = 0; i < map.labels.size(); ++i) {
    const std::size_t l = map.labels[i];
    if (l >= kPalette.size()) {
      throw ContractError("label " + std::to_string(l) + " at pixel (row " +
                          std::to_string(i / map.width) + ", col " +
                          std::to_string(i % map.width) + ") has no palette entry (max " +
                          std::to_string(kPalette.size() - 1) + ")");
    }
    out.insert(out.end(), kPalette[l].begin(), kPalette[l].end());
  }
  return out;
}

}  // namespace hsigan::eval
