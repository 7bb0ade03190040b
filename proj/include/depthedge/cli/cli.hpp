#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "depthedge/edges/edges.hpp"
#include "depthedge/losses/gradcheck.hpp"
#include "depthedge/metrics/report.hpp"

namespace depthedge::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitPartial = 1;
inline constexpr int kExitConfig = 2;

/// Everything a subcommand needs, after merging the config file and flags.
struct RunConfig {
  std::string subcommand;
  std::filesystem::path out = ".";
  std::optional<std::filesystem::path> pred_dir;
  std::optional<std::filesystem::path> gt_dir;
  std::optional<std::filesystem::path> annotations_dir;
  std::optional<std::filesystem::path> spec_file;  // synth
  std::string method;                              // table row label; defaults to the prediction directory name

  metrics::EvalConfig eval{};
  losses::LossWeights weights{};
  losses::LossOptions loss_options{};

  int samples = 100;  // sweep
  std::uint64_t seed = 0;
  bool seed_set = false;  // seed came from a flag or the config file
  int jobs = 1;
  bool timestamp = true;

  // gradcheck
  double tol = 1e-3;
  int grad_size = 8;
  double grad_step = 1e-6;
  std::vector<losses::Term> terms;
};

/// Config-file layer: TOML with [eval], [losses], [canny] and [sweep]
/// tables of flat keys. Unknown tables or keys are config errors
/// (ParameterError).
void apply_config_file(const std::filesystem::path& path, RunConfig& cfg);
void apply_config_text(const std::string& toml_text, RunConfig& cfg, const std::string& source = "config");

/// Parses "min,max" or "none".
std::optional<metrics::ClipRange> parse_clip(const std::string& text);

// Subcommands. Each returns an exit code and writes into cfg.out.
int cmd_eval(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_dbe(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_losses(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_gradcheck(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_synth(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Full command line (args[0] is the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Current UTC time as ISO 8601.
std::string utc_timestamp();

}  // namespace depthedge::cli
