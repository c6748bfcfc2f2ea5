// Regenerates the frozen fixtures in tests/data. Run only when a fixture
// definition changes deliberately: freeze_fixtures <tests/data dir>
#include <cstdio>
#include <filesystem>

#include "hsigan/data/binio.hpp"
#include "hsigan/eval/render.hpp"
#include "support/checkerboard.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: freeze_fixtures <dir>\n");
    return 2;
  }
  const std::filesystem::path dir = argv[1];
  const auto fx = hsigan::testing::make_checkerboard();
  hsigan::data::save_hsc(dir / "checkerboard.hsc", fx.cube, &fx.truth);
  hsigan::data::save_sfp(dir / "checkerboard.sfp", fx.field);
  hsigan::data::write_file(dir / "checkerboard_truth.ppm", hsigan::eval::render_map(fx.truth));
  return 0;
}
