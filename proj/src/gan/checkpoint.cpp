#include "hsigan/gan/checkpoint.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "hsigan/data/binio.hpp"

namespace hsigan::gan {

namespace {
constexpr char kMagic[] = "GANC";
constexpr std::uint16_t kVersion = 1;
}  // namespace

std::vector<std::uint8_t> encode_checkpoint(GanModel<float>& model) {
  const GanConfig& c = model.config();
  data::ByteWriter w;
  w.magic(kMagic);
  w.u16(kVersion);
  for (std::size_t v : {c.n_y, c.bands, c.w, c.k, c.noise_dim, c.arch.spectral, c.arch.spatial}) {
    w.u32(static_cast<std::uint32_t>(v));
  }
  for (const auto& buf : model.state()) {
    for (float v : buf) w.f32(v);
  }
  return w.bytes();
}

GanModel<float> decode_checkpoint(std::span<const std::uint8_t> bytes) {
  data::ByteReader r(bytes, "GANC");
  r.expect_magic(kMagic);
  const std::uint16_t version = r.u16();
  if (version != kVersion) {
    throw FormatError("GANC: unsupported version " + std::to_string(version));
  }
  GanConfig c;
  c.n_y = r.u32();
  c.bands = r.u32();
  c.w = r.u32();
  c.k = r.u32();
  c.noise_dim = r.u32();
  c.arch.spectral = r.u32();
  c.arch.spatial = r.u32();
  GanModel<float> model(c);
  std::size_t total = 0;
  for (const auto& buf : model.state()) total += buf.size();
  r.need(total * 4);
  for (auto buf : model.state()) {
    for (float& v : buf) v = r.f32();
  }
  if (r.remaining() != 0) {
    throw FormatError("GANC: " + std::to_string(r.remaining()) + " trailing bytes after offset " +
                      std::to_string(r.offset()));
  }
  return model;
}

void save_checkpoint(const std::filesystem::path& path, GanModel<float>& model) {
  data::write_file(path, encode_checkpoint(model));
}

GanModel<float> load_checkpoint(const std::filesystem::path& path) {
  try {
    return decode_checkpoint(data::read_file(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_loss_csv(const std::filesystem::path& path, const std::vector<LossRecord>& history) {
  std::string text = "step,l_sup,l_d1,l_d2,l_semi,l_g\n";
  char line[256];
  for (const auto& r : history) {
    std::snprintf(line, sizeof line, "%zu,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.step, r.sup, r.d1,
                  r.d2, r.semi, r.g);
    text += line;
  }
  data::write_file(path, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

std::vector<LossRecord> read_loss_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  if (line != "step,l_sup,l_d1,l_d2,l_semi,l_g") {
    throw FormatError(path.string() + ": unexpected loss CSV header");
  }
  std::vector<LossRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    LossRecord r;
    if (std::sscanf(line.c_str(), "%zu,%lf,%lf,%lf,%lf,%lf", &r.step, &r.sup, &r.d1, &r.d2,
                    &r.semi, &r.g) != 6) {
      throw FormatError(path.string() + ": malformed loss row \"" + line + "\"");
    }
    out.push_back(r);
  }
  return out;
}

}  // namespace hsigan::gan
