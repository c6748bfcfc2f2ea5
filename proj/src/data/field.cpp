#include "hsigan/data/field.hpp"

#include <string>

#include "hsigan/data/binio.hpp"

namespace hsigan::data {

namespace {
constexpr char kMagic[] = "SFP1";
}

LabelMap argmax_map(const SoftmaxField& field, std::size_t first) {
  if (first >= field.channels) throw ShapeError("field has no class channels");
  LabelMap map(field.height, field.width);
  for (std::size_t i = 0; i < field.pixels(); ++i) {
    const auto v = field.at(i);
    std::size_t best = first;
    for (std::size_t c = first + 1; c < field.channels; ++c) {
      if (v[c] > v[best]) best = c;
    }
    map.labels[i] = static_cast<std::uint16_t>(best - first + 1);
  }
  return map;
}

std::vector<std::uint8_t> encode_sfp(const SoftmaxField& field) {
  if (field.values.size() != field.pixels() * field.channels) {
    throw ShapeError("field payload does not match its dimensions");
  }
  ByteWriter w;
  w.magic(kMagic);
  w.u32(static_cast<std::uint32_t>(field.height));
  w.u32(static_cast<std::uint32_t>(field.width));
  w.u32(static_cast<std::uint32_t>(field.channels));
  for (double v : field.values) w.f32(static_cast<float>(v));
  return w.bytes();
}

SoftmaxField decode_sfp(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes, "SFP");
  r.expect_magic(kMagic);
  const std::size_t h = r.u32();
  const std::size_t w = r.u32();
  const std::size_t c = r.u32();
  SoftmaxField f(h, w, c);
  r.need(f.values.size() * 4);
  for (double& v : f.values) v = r.f32();
  if (r.remaining() != 0) {
    throw FormatError("SFP: " + std::to_string(r.remaining()) + " trailing bytes after offset " +
                      std::to_string(r.offset()));
  }
  return f;
}

void save_sfp(const std::filesystem::path& path, const SoftmaxField& field) {
  write_file(path, encode_sfp(field));
}

SoftmaxField load_sfp(const std::filesystem::path& path) {
  try {
    return decode_sfp(read_file(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace hsigan::data
