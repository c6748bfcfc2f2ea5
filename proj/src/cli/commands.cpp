#include "hsigan/cli/commands.hpp"

#include <cstdio>
#include <cstdlib>
#include <map>
#include <optional>

#include "CLI11.hpp"
#include "hsigan/crf/densecrf.hpp"
#include "hsigan/data/binio.hpp"
#include "hsigan/data/field.hpp"
#include "hsigan/errors.hpp"
#include "hsigan/eval/metrics.hpp"
#include "hsigan/eval/render.hpp"
#include "hsigan/gan/checkpoint.hpp"
#include "hsigan/gan/predict.hpp"

namespace hsigan::cli {

namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  data::write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

fs::path prepare_out(const RunConfig& cfg) {
  const fs::path out = cfg.out;
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw IoError("cannot create output directory " + out.string() + ": " + ec.message());
  write_text(out / "config.json", to_json(cfg).dump(2) + "\n");
  return out;
}

struct LabeledCube {
  data::HsiCube cube;
  data::LabelMap labels;
};

LabeledCube load_labeled(const fs::path& path) {
  auto c = data::load_hsc(path);
  if (!c.labels) throw ValidationError(path.string() + " carries no labels");
  return {std::move(c.cube), std::move(*c.labels)};
}

// Label map plus its class count, from a label-map file or a labeled cube.
std::pair<data::LabelMap, std::size_t> load_labels(const fs::path& path) {
  auto c = load_labeled(path);
  return {std::move(c.labels), c.cube.n_y};
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

}  // namespace

void cmd_synth(const RunConfig& cfg, std::ostream& log) {
  auto [cube, labels] = data::synth_scene(cfg.synth);
  const fs::path out = prepare_out(cfg);
  data::save_hsc(out / "scene.hsc", cube, &labels);
  std::vector<std::size_t> counts(cube.n_y + 1, 0);
  for (auto l : labels.labels) ++counts[l];
  log << "scene " << cube.height << "x" << cube.width << "x" << cube.bands << ", " << cube.n_y
      << " classes, sigma " << cfg.synth.noise_sigma << "\n";
  for (std::size_t c = 1; c <= cube.n_y; ++c) log << "  class " << c << ": " << counts[c] << " pixels\n";
  log << "wrote " << (out / "scene.hsc").string() << "\n";
}

void cmd_train(const RunConfig& cfg, std::ostream& log) {
  LabeledCube scene;
  if (cfg.data_path.empty()) {
    auto [cube, labels] = data::synth_scene(cfg.synth);
    scene = {std::move(cube), std::move(labels)};
  } else {
    scene = load_labeled(cfg.data_path);
  }
  const std::size_t n_y = scene.cube.n_y;
  gan::GanConfig model_cfg = cfg.model(scene.cube.bands, n_y);
  gan::validate(model_cfg);
  gan::TrainConfig train_cfg = cfg.train;
  train_cfg.seed = cfg.split.seed;
  gan::validate(train_cfg);

  const fs::path out = prepare_out(cfg);
  if (cfg.data_path.empty()) data::save_hsc(out / "scene.hsc", scene.cube, &scene.labels);

  const data::HsiCube scaled = data::scale_bands(scene.cube).cube;
  const data::Split split = data::sample_split(scene.labels, n_y, cfg.split);
  log << "split: " << split.labeled.size() << " labeled, " << split.unlabeled.size()
      << " unlabeled, " << split.test.size() << " test\n";

  auto labeled = data::extract_cuboids(scaled, &scene.labels, split.labeled, cfg.w);
  auto unlabeled = data::extract_cuboids(scaled, nullptr, split.unlabeled, cfg.w);
  gan::TrainingData td{std::move(labeled.cubes), std::move(labeled.labels),
                       std::move(unlabeled.cubes)};

  gan::GanModel<float> model(model_cfg);
  auto init_rng = gan::seeded_rng(cfg.split.seed, 0);
  model.initialize(init_rng);

  const auto result = gan::fit(model, td, train_cfg, [&](std::size_t epoch) {
    char name[32];
    std::snprintf(name, sizeof name, "epoch-%05zu.ganc", epoch);
    fs::create_directories(out / "checkpoints");
    gan::save_checkpoint(out / "checkpoints" / name, model);
    log << "epoch " << epoch << ": checkpoint " << name << "\n";
  });
  gan::save_checkpoint(out / "model.ganc", model);
  gan::write_loss_csv(out / "loss.csv", result.history);
  if (!result.history.empty()) {
    const auto& h = result.history.back();
    log << "trained " << result.history.size() << " steps; last l_sup " << fmt("%.4g", h.sup)
        << " l_d1 " << fmt("%.4g", h.d1) << " l_d2 " << fmt("%.4g", h.d2) << " l_g "
        << fmt("%.4g", h.g) << "\n";
  } else {
    log << "0 epochs: model left at its initialization\n";
  }

  const data::SoftmaxField field = gan::predict_field(model, scaled);
  data::save_sfp(out / "field.sfp", field);
  const data::LabelMap pre = data::argmax_map(field, 1);
  data::save_label_map(out / "pre_crf.hsc", pre, n_y);
  data::write_file(out / "pre_crf.ppm", eval::render_map(pre));

  data::LabelMap test_truth(scene.labels.height, scene.labels.width);
  for (std::size_t p : split.test) test_truth.labels[p] = scene.labels.labels[p];
  data::save_label_map(out / "test_truth.hsc", test_truth, n_y);
  if (split.test.empty()) {
    log << "test set is empty; no metrics written\n";
    return;
  }
  const auto report = eval::metrics(eval::confusion(test_truth, pre, n_y));
  write_text(out / "metrics.json", eval::metrics_json(report));
  log << "test OA " << fmt("%.4f", report.oa) << ", AA " << fmt("%.4f", report.aa) << ", kappa "
      << fmt("%.4f", report.kappa) << " over " << report.evaluated << " pixels\n";
}

void cmd_crf(const RunConfig& cfg, const std::string& field_path, const std::string& cube_path,
             const std::string& truth_path, std::ostream& log) {
  crf::validate(cfg.crf);
  const data::SoftmaxField field = data::load_sfp(field_path);
  auto contents = data::load_hsc(cube_path);
  const data::HsiCube& cube = contents.cube;
  if (field.height != cube.height || field.width != cube.width) {
    throw ShapeError("field is " + std::to_string(field.height) + "x" +
                     std::to_string(field.width) + " but cube is " + std::to_string(cube.height) +
                     "x" + std::to_string(cube.width));
  }
  std::optional<std::pair<data::LabelMap, std::size_t>> truth;
  if (!truth_path.empty()) truth = load_labels(truth_path);
  else if (contents.labels) truth.emplace(std::move(*contents.labels), cube.n_y);
  if (truth && (truth->first.height != cube.height || truth->first.width != cube.width)) {
    throw ShapeError("truth map does not match the cube dimensions");
  }

  const fs::path out = prepare_out(cfg);
  const data::PixelFeatures feats = data::pca3(cube);
  const crf::MeanfieldResult r = crf::meanfield_infer(field, feats, cfg.crf);

  std::string csv = "iteration,max_change,normalization_error\n";
  for (std::size_t it = 0; it < r.max_change.size(); ++it) {
    char row[96];
    std::snprintf(row, sizeof row, "%zu,%.17g,%.17g\n", it + 1, r.max_change[it],
                  r.normalization_error[it]);
    csv += row;
    log << "iteration " << it + 1 << ": max change " << fmt("%.3e", r.max_change[it]) << "\n";
  }
  write_text(out / "crf_log.csv", csv);

  const std::size_t n_y = field.channels - 1;
  const data::LabelMap refined = crf::map_decode(r.q);
  data::save_label_map(out / "crf.hsc", refined, n_y);
  data::write_file(out / "crf.ppm", eval::render_map(refined));
  if (!truth) {
    log << "no truth labels; metrics skipped\n";
    return;
  }
  const auto unary = eval::metrics(eval::confusion(truth->first, data::argmax_map(field, 1), n_y));
  const auto post = eval::metrics(eval::confusion(truth->first, refined, n_y));
  write_text(out / "unary_metrics.json", eval::metrics_json(unary));
  write_text(out / "metrics.json", eval::metrics_json(post));
  log << "OA " << fmt("%.4f", unary.oa) << " -> " << fmt("%.4f", post.oa) << ", kappa "
      << fmt("%.4f", unary.kappa) << " -> " << fmt("%.4f", post.kappa) << " over "
      << post.evaluated << " pixels\n";
}

std::string cmd_eval(const std::string& truth_path, const std::string& pred_path) {
  const auto [truth, n_y] = load_labels(truth_path);
  const auto [pred, pred_n_y] = load_labels(pred_path);
  (void)pred_n_y;
  return eval::metrics_json(eval::metrics(eval::confusion(truth, pred, n_y)));
}

void cmd_render(const std::string& pred_path, const std::string& ppm_path) {
  data::write_file(ppm_path, eval::render_map(load_labels(pred_path).first));
}

namespace {

struct ConfigOptions {
  std::string config_file;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
};

void add_config_options(CLI::App& app, ConfigOptions& opts) {
  app.add_option("--config", opts.config_file, "flat JSON config (overridden by flags)");
  for (const auto& key : config_keys()) {
    opts.options[key.name] = app.add_option("--" + key.name, opts.values[key.name], key.help);
  }
}

RunConfig resolve(const ConfigOptions& opts) {
  RunConfig cfg = opts.config_file.empty() ? RunConfig{} : load_config_file(opts.config_file);
  if (const char* seed = std::getenv("HSIGAN_SEED"); seed && *seed) {
    apply_value(cfg, "split.seed", seed);
  }
  for (const auto& [name, opt] : opts.options) {
    if (opt->count() > 0) apply_value(cfg, name, opts.values.at(name));
  }
  return cfg;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Semi-supervised spectral-spatial GAN with dense CRF refinement", "hsigan"};
  app.require_subcommand(1);

  ConfigOptions synth_opts, train_opts, crf_opts;
  auto* synth = app.add_subcommand("synth", "write a synthetic labeled scene");
  add_config_options(*synth, synth_opts);
  auto* train = app.add_subcommand("train", "train the GAN and write the pre-CRF map and metrics");
  add_config_options(*train, train_opts);

  auto* crf = app.add_subcommand("crf", "refine a softmax field with the dense CRF");
  add_config_options(*crf, crf_opts);
  std::string field_path, cube_path, truth_path;
  crf->add_option("--field", field_path, "SFP softmax field (1 + n_y channels)")->required();
  crf->add_option("--cube", cube_path, "HSC cube the field was predicted from")->required();
  crf->add_option("--truth", truth_path, "label map for metrics (default: cube labels)");

  auto* evalc = app.add_subcommand("eval", "metrics JSON for a prediction against truth");
  std::string eval_truth, eval_pred, eval_json;
  evalc->add_option("--truth", eval_truth, "truth label map or labeled cube")->required();
  evalc->add_option("--pred", eval_pred, "predicted label map")->required();
  evalc->add_option("--json", eval_json, "also write the metrics here");

  auto* render = app.add_subcommand("render", "render a label map as binary PPM");
  std::string render_pred, render_ppm;
  render->add_option("--pred", render_pred, "label map")->required();
  render->add_option("--ppm", render_ppm, "output image")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (synth->parsed()) {
      cmd_synth(resolve(synth_opts), out);
    } else if (train->parsed()) {
      cmd_train(resolve(train_opts), out);
    } else if (crf->parsed()) {
      cmd_crf(resolve(crf_opts), field_path, cube_path, truth_path, out);
    } else if (evalc->parsed()) {
      const std::string json = cmd_eval(eval_truth, eval_pred);
      if (!eval_json.empty()) write_text(eval_json, json);
      out << json;
    } else if (render->parsed()) {
      cmd_render(render_pred, render_ppm);
    }
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ShapeError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ContractError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace hsigan::cli
