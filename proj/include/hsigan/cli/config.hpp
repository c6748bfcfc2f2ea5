#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "hsigan/crf/densecrf.hpp"
#include "hsigan/data/hsi.hpp"
#include "hsigan/gan/model.hpp"
#include "hsigan/gan/train.hpp"
#include "json.hpp"

namespace hsigan::cli {

/// Everything a run needs. Every field has a default; the all-default config
/// trains on the built-in synthetic scene.
///
/// split.seed is the run seed: it drives the split, weight initialization
/// and training (train.seed is set from it).
struct RunConfig {
  std::string data_path;  // HSC with labels; empty selects the synthetic scene
  data::SynthConfig synth;
  data::SplitSpec split;
  std::size_t k = 24;
  std::size_t noise_dim = 200;
  std::size_t w = 9;
  std::string arch = "3+3";
  gan::TrainConfig train;
  crf::CrfConfig crf;
  std::string out = "hsigan-run";

  /// Model shape for a cube with the given band and class counts.
  gan::GanConfig model(std::size_t bands, std::size_t n_y) const;
};

enum class ValueKind { integer, real, boolean, text };

struct ConfigKey {
  std::string name;  // dotted, e.g. "split.m-l"; also the flag name
  ValueKind kind;
  std::string help;
};

/// Every key in canonical order.
const std::vector<ConfigKey>& config_keys();

/// Flat {"key": value} object with every key, in canonical order.
nlohmann::ordered_json to_json(const RunConfig& cfg);

/// Overlays a flat object; unknown keys and wrongly typed values throw
/// ValidationError. Underscores in key names are read as hyphens.
void apply_json(RunConfig& cfg, const nlohmann::json& j);

/// Overlays one key from its command-line text.
void apply_value(RunConfig& cfg, const std::string& key, const std::string& text);

RunConfig load_config_file(const std::filesystem::path& path);

}  // namespace hsigan::cli
