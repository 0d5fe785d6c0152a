#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "warehouse/env.hpp"

namespace warehouse {

enum class Mode { NavDqn, MaxSpace, Multi };

const char* to_string(Mode mode);
Mode mode_from_string(std::string_view name);

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Directory holding the shipped maps (compiled in, overridable with the
/// WAREHOUSE_DATA_DIR environment variable).
std::filesystem::path data_dir();
std::filesystem::path default_map(Mode mode);

/// Everything needed to reproduce a training run. Seeds fan out as: seed for
/// exploration, sampling and the environment; seed + 1 for network weights;
/// seed + 2 for evaluation.
struct RunConfig {
  Mode mode = Mode::NavDqn;
  std::filesystem::path map;
  std::size_t episodes = 500;
  std::uint64_t seed = 0;
  std::filesystem::path out = "runs/out";

  double gamma = 0.90;
  std::size_t batch_size = 32;
  double learning_rate = 0.0025;
  std::size_t replay_capacity = 1000;
  std::vector<std::size_t> hidden = {0, 0};
  bool early_stop = true;

  double epsilon_init = 1.0;
  double epsilon_floor = 0.1;
  double epsilon_decay = 0.99;
  double alpha_init = 0.03;
  double alpha_slope = 0.002;
  double alpha_floor = 0.001;
  std::size_t step_cap = 0;  ///< 0 selects the environment default

  static RunConfig defaults(Mode mode);
  /// Throws ConfigError on out-of-range values or a missing map file.
  void validate() const;
};

/// Keys accepted in config files and as --key flags.
const std::vector<std::string>& config_keys();

/// Parses `key = value` lines (`#` starts a comment), then applies
/// `overrides` on top. The mode comes from the overrides, the file, or
/// `mode_hint`, in that order; mode-specific defaults fill the rest.
RunConfig parse_config(std::string_view text, const std::map<std::string, std::string>& overrides = {},
                       std::optional<Mode> mode_hint = std::nullopt);

/// Text form accepted back by parse_config.
std::string config_echo(const RunConfig& config);

struct RunSummary {
  std::size_t episodes_run = 0;
  double final_win_rate = 0.0;
  double trailing_steps = 0.0;
  std::optional<std::size_t> early_stop_episode;
  std::string line() const;
};

/// Trains per the config and writes config.txt, metrics.csv, *.svg and the
/// learned tables or parameters into config.out.
RunSummary run(const RunConfig& config, std::ostream& log);

struct EvalOptions {
  Mode mode = Mode::MaxSpace;
  std::filesystem::path map;
  std::filesystem::path dir = "runs/out";  ///< where the trained snapshot lives
  bool persist = false;
  std::size_t trials = 1;
  bool freeze_humans = false;
  std::uint64_t seed = 0;
};

struct EvalSummary {
  EndReason reason = EndReason::Ongoing;
  double reward = 0.0;
  std::size_t steps = 0;
  std::vector<double> success;  ///< multi-agent only
  std::string line() const;
};

/// Greedy evaluation of a saved snapshot. With persist on the storage map,
/// bay capacities are read from and written back to capacity_state.txt in
/// `dir`, so consecutive runs see the space taken by earlier ones.
EvalSummary evaluate(const EvalOptions& options, std::ostream& log);

/// Prints BFS shortest paths and value-iteration results for a map.
/// Returns 0 when the two agree.
int run_oracle(const std::filesystem::path& map_path, std::optional<MapKind> kind, double gamma,
               std::ostream& out);

MapKind guess_map_kind(const std::filesystem::path& path);

/// Regenerates the SVG plots of a metrics CSV into `out_dir`.
void plot_metrics(const std::filesystem::path& csv, const std::filesystem::path& out_dir, std::size_t window);

}  // namespace warehouse
