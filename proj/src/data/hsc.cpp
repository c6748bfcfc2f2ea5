#include <limits>
#include <string>

#include "hsigan/data/binio.hpp"
#include "hsigan/data/hsi.hpp"

namespace hsigan::data {

namespace {

constexpr char kMagic[] = "HSC1";
constexpr std::uint16_t kVersion = 1;
constexpr std::uint8_t kLabelsPresent = 0x01;

std::uint32_t checked_u32(std::size_t v, const char* field) {
  if (v > std::numeric_limits<std::uint32_t>::max()) {
    throw ValidationError(std::string("HSC ") + field + " exceeds 32 bits");
  }
  return static_cast<std::uint32_t>(v);
}

}  // namespace

std::vector<std::uint8_t> encode_hsc(const HsiCube& cube, const LabelMap* labels) {
  if (cube.radiance.size() != cube.pixels() * cube.bands) {
    throw ShapeError("cube payload does not match its dimensions");
  }
  if (cube.n_y > std::numeric_limits<std::uint16_t>::max()) {
    throw ValidationError("n_y exceeds 16 bits");
  }
  if (labels && (labels->height != cube.height || labels->width != cube.width ||
                 labels->labels.size() != labels->pixels())) {
    throw ShapeError("label map dimensions differ from the cube");
  }
  ByteWriter w;
  w.magic(kMagic);
  w.u16(kVersion);
  w.u32(checked_u32(cube.height, "height"));
  w.u32(checked_u32(cube.width, "width"));
  w.u32(checked_u32(cube.bands, "bands"));
  w.u16(static_cast<std::uint16_t>(cube.n_y));
  w.u8(labels ? kLabelsPresent : 0);
  for (float v : cube.radiance) w.f32(v);
  if (labels) {
    for (std::uint16_t l : labels->labels) w.u16(l);
  }
  return w.bytes();
}

HscContents decode_hsc(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes, "HSC");
  r.expect_magic(kMagic);
  const std::uint16_t version = r.u16();
  if (version != kVersion) {
    throw FormatError("HSC: unsupported version " + std::to_string(version));
  }
  HscContents out;
  HsiCube& cube = out.cube;
  cube.height = r.u32();
  cube.width = r.u32();
  cube.bands = r.u32();
  cube.n_y = r.u16();
  const std::uint8_t flags = r.u8();

  const std::size_t values = cube.pixels() * cube.bands;
  r.need(values * 4);
  cube.radiance.resize(values);
  for (float& v : cube.radiance) v = r.f32();

  if (flags & kLabelsPresent) {
    r.need(cube.pixels() * 2);
    LabelMap labels(cube.height, cube.width);
    for (std::size_t row = 0; row < cube.height; ++row) {
      for (std::size_t col = 0; col < cube.width; ++col) {
        const std::uint16_t l = r.u16();
        if (l > cube.n_y) {
          throw ValidationError("label " + std::to_string(l) + " at pixel (row " +
                                std::to_string(row) + ", col " + std::to_string(col) +
                                ") exceeds n_y = " + std::to_string(cube.n_y));
        }
        labels.at(row, col) = l;
      }
    }
    out.labels = std::move(labels);
  }
  if (r.remaining() != 0) {
    throw FormatError("HSC: " + std::to_string(r.remaining()) +
                      " trailing bytes after offset " + std::to_string(r.offset()));
  }
  return out;
}

HscContents load_hsc(const std::filesystem::path& path) {
  try {
    return decode_hsc(read_file(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

void save_hsc(const std::filesystem::path& path, const HsiCube& cube, const LabelMap* labels) {
  write_file(path, encode_hsc(cube, labels));
}

void save_label_map(const std::filesystem::path& path, const LabelMap& labels, std::size_t n_y) {
  HsiCube empty;
  empty.height = labels.height;
  empty.width = labels.width;
  empty.n_y = n_y;
  save_hsc(path, empty, &labels);
}

LabelMap load_label_map(const std::filesystem::path& path) {
  HscContents c = load_hsc(path);
  if (!c.labels) throw FormatError(path.string() + ": HSC file carries no labels");
  return std::move(*c.labels);
}

}  // namespace hsigan::data
