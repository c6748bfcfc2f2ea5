#include "hsigan/cli/config.hpp"

#include <charconv>
#include <cstdlib>
#include <functional>
#include <fstream>
#include <sstream>

#include "hsigan/errors.hpp"

namespace hsigan::cli {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

struct Binding {
  ConfigKey key;
  std::function<ordered_json(const RunConfig&)> get;
  std::function<void(RunConfig&, const json&)> set;
};

[[noreturn]] void bad_type(const std::string& key, const char* expected, const json& v) {
  throw ValidationError("config key \"" + key + "\" expects " + expected + ", got " + v.dump());
}

// `ref` maps a config to the bound member; the same accessor serves reads and writes.
template <typename Ref>
Binding integer(std::string name, std::string help, Ref ref) {
  return {{name, ValueKind::integer, std::move(help)},
          [ref](const RunConfig& c) { return ordered_json(ref(const_cast<RunConfig&>(c))); },
          [ref, name](RunConfig& c, const json& v) {
            if (!v.is_number_unsigned()) bad_type(name, "a non-negative integer", v);
            using T = std::remove_reference_t<decltype(ref(c))>;
            ref(c) = static_cast<T>(v.get<std::uint64_t>());
          }};
}

template <typename Ref>
Binding real(std::string name, std::string help, Ref ref) {
  return {{name, ValueKind::real, std::move(help)},
          [ref](const RunConfig& c) { return ordered_json(ref(const_cast<RunConfig&>(c))); },
          [ref, name](RunConfig& c, const json& v) {
            if (!v.is_number()) bad_type(name, "a number", v);
            ref(c) = v.get<double>();
          }};
}

template <typename Ref>
Binding boolean(std::string name, std::string help, Ref ref) {
  return {{name, ValueKind::boolean, std::move(help)},
          [ref](const RunConfig& c) { return ordered_json(ref(const_cast<RunConfig&>(c))); },
          [ref, name](RunConfig& c, const json& v) {
            if (!v.is_boolean()) bad_type(name, "true or false", v);
            ref(c) = v.get<bool>();
          }};
}

template <typename Ref>
Binding text(std::string name, std::string help, Ref ref) {
  return {{name, ValueKind::text, std::move(help)},
          [ref](const RunConfig& c) { return ordered_json(ref(const_cast<RunConfig&>(c))); },
          [ref, name](RunConfig& c, const json& v) {
            if (!v.is_string()) bad_type(name, "a string", v);
            ref(c) = v.get<std::string>();
          }};
}

#define HSIGAN_REF(member) [](RunConfig& c) -> auto& { return c.member; }

const std::vector<Binding>& bindings() {
  static const std::vector<Binding> table = {
      text("data.path", "HSC cube with labels; empty uses the synthetic scene", HSIGAN_REF(data_path)),
      integer("synth.height", "synthetic scene rows", HSIGAN_REF(synth.height)),
      integer("synth.width", "synthetic scene columns", HSIGAN_REF(synth.width)),
      integer("synth.bands", "synthetic scene bands", HSIGAN_REF(synth.bands)),
      integer("synth.n-y", "synthetic scene classes", HSIGAN_REF(synth.n_y)),
      real("synth.sigma", "synthetic per-pixel noise std", HSIGAN_REF(synth.noise_sigma)),
      integer("synth.seed", "synthetic scene seed", HSIGAN_REF(synth.seed)),
      integer("split.m-l", "labeled cuboids", HSIGAN_REF(split.labeled_count)),
      integer("split.m-u", "unlabeled cuboids", HSIGAN_REF(split.unlabeled_count)),
      integer("split.seed", "run seed (split, initialization, training)", HSIGAN_REF(split.seed)),
      integer("split.min-per-class", "labeled floor per class", HSIGAN_REF(split.min_per_class)),
      integer("model.k", "kernels per layer", HSIGAN_REF(k)),
      text("model.arch", "discriminator depth as spectral+spatial", HSIGAN_REF(arch)),
      integer("model.noise-dim", "generator noise length", HSIGAN_REF(noise_dim)),
      integer("model.w", "cuboid width (odd)", HSIGAN_REF(w)),
      real("train.lr", "Adam learning rate", HSIGAN_REF(train.lr)),
      integer("train.batch", "minibatch size", HSIGAN_REF(train.batch)),
      integer("train.epochs", "passes over the labeled pool", HSIGAN_REF(train.epochs)),
      integer("train.noise-samples", "noise draws per generator update", HSIGAN_REF(train.noise_samples)),
      boolean("train.use-unlabeled", "feed unlabeled cuboids to the discriminator", HSIGAN_REF(train.use_unlabeled)),
      integer("train.checkpoint-every", "epochs between checkpoints (0 = final only)", HSIGAN_REF(train.checkpoint_every)),
      real("crf.c", "Potts weight", HSIGAN_REF(crf.potts_c)),
      real("crf.theta-alpha", "spatial bandwidth (pixels)", HSIGAN_REF(crf.theta_alpha)),
      real("crf.theta-beta", "appearance bandwidth (standardized PCA units)", HSIGAN_REF(crf.theta_beta)),
      integer("crf.iterations", "mean-field iterations", HSIGAN_REF(crf.iterations)),
      integer("crf.tile", "tile side for large images", HSIGAN_REF(crf.tile)),
      integer("crf.overlap", "tile margin", HSIGAN_REF(crf.overlap)),
      text("out", "output directory", HSIGAN_REF(out)),
  };
  return table;
}

#undef HSIGAN_REF

const Binding& find(std::string key) {
  for (char& ch : key) {
    if (ch == '_') ch = '-';
  }
  for (const auto& b : bindings()) {
    if (b.key.name == key) return b;
  }
  throw ValidationError("unknown config key \"" + key + "\"");
}

}  // namespace

gan::GanConfig RunConfig::model(std::size_t bands, std::size_t n_y) const {
  gan::GanConfig g;
  g.n_y = n_y;
  g.bands = bands;
  g.w = w;
  g.k = k;
  g.noise_dim = noise_dim;
  g.arch = gan::Architecture::parse(arch);
  return g;
}

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> k;
    for (const auto& b : bindings()) k.push_back(b.key);
    return k;
  }();
  return keys;
}

ordered_json to_json(const RunConfig& cfg) {
  ordered_json j = ordered_json::object();
  for (const auto& b : bindings()) j[b.key.name] = b.get(cfg);
  return j;
}

void apply_json(RunConfig& cfg, const json& j) {
  if (!j.is_object()) throw ValidationError("config must be a flat JSON object");
  for (const auto& [key, value] : j.items()) find(key).set(cfg, value);
}

void apply_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  const Binding& b = find(key);
  auto fail = [&] {
    throw ValidationError("--" + b.key.name + ": cannot read \"" + value + "\"");
  };
  switch (b.key.kind) {
    case ValueKind::integer: {
      std::uint64_t v = 0;
      const auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
      if (value.empty() || ec != std::errc() || end != value.data() + value.size()) fail();
      b.set(cfg, json(v));
      break;
    }
    case ValueKind::real: {
      char* end = nullptr;
      const double v = std::strtod(value.c_str(), &end);
      if (value.empty() || end != value.c_str() + value.size()) fail();
      b.set(cfg, json(v));
      break;
    }
    case ValueKind::boolean:
      if (value == "true" || value == "1") b.set(cfg, json(true));
      else if (value == "false" || value == "0") b.set(cfg, json(false));
      else fail();
      break;
    case ValueKind::text:
      b.set(cfg, json(value));
      break;
  }
}

RunConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  json j;
  try {
    j = json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  RunConfig cfg;
  apply_json(cfg, j);
  return cfg;
}

}  // namespace hsigan::cli
