#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "hsigan/cli/config.hpp"

namespace hsigan::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitValidation = 2;

/// Parses `args` (without the program name), runs one subcommand and maps
/// failures to exit codes: 2 for bad input (validation, shape, contract,
/// usage), 1 for everything else.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Subcommands, callable directly with a resolved config. Each writes
// config.json into cfg.out alongside its products.

/// scene.hsc (cube + labels).
void cmd_synth(const RunConfig& cfg, std::ostream& log);

/// model.ganc, loss.csv, field.sfp, pre_crf.hsc/.ppm, test_truth.hsc, metrics.json
/// (test pixels), plus scene.hsc for synthetic runs and checkpoints/ when enabled.
void cmd_train(const RunConfig& cfg, std::ostream& log);

/// crf.hsc/.ppm and crf_log.csv; metrics.json and unary_metrics.json when a
/// truth map is available (`truth_path`, else the cube's own labels).
void cmd_crf(const RunConfig& cfg, const std::string& field_path, const std::string& cube_path,
             const std::string& truth_path, std::ostream& log);

/// Metrics JSON for two label maps; n_y comes from the truth file.
std::string cmd_eval(const std::string& truth_path, const std::string& pred_path);

void cmd_render(const std::string& pred_path, const std::string& ppm_path);

}  // namespace hsigan::cli
