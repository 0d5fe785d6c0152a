#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "warehouse/harness.hpp"
#include "warehouse/metrics.hpp"

using namespace warehouse;

int main(int argc, char** argv) {
  CLI::App app{"Warehouse grid-world reinforcement learning"};
  app.require_subcommand(1);

  // train
  auto* train = app.add_subcommand("train", "Train an agent and write metrics, plots and snapshots");
  std::string train_mode;
  std::string config_file;
  train->add_option("mode", train_mode, "nav-dqn | max-space | multi")->required();
  train->add_option("--config", config_file, "key = value config file")->check(CLI::ExistingFile);
  std::map<std::string, std::string> flag_values;
  for (const auto& key : config_keys()) {
    if (key == "mode") continue;
    train->add_option("--" + key, flag_values[key]);
  }

  // eval
  auto* eval = app.add_subcommand("eval", "Greedy evaluation of a trained snapshot");
  std::string eval_mode;
  EvalOptions eval_opts;
  std::string eval_map;
  eval->add_option("mode", eval_mode, "nav-dqn | max-space | multi")->required();
  eval->add_option("--map", eval_map);
  eval->add_option("--dir,--out", eval_opts.dir, "directory of the trained run");
  eval->add_flag("--persist", eval_opts.persist, "keep storage capacities between evaluations");
  eval->add_option("--trials", eval_opts.trials);
  eval->add_flag("--freeze-humans", eval_opts.freeze_humans);
  eval->add_option("--seed", eval_opts.seed);

  // oracle
  auto* oracle = app.add_subcommand("oracle", "BFS and value-iteration ground truth for a map");
  std::string oracle_map;
  std::string oracle_kind;
  double oracle_gamma = 0.9;
  oracle->add_option("--map", oracle_map)->required();
  oracle->add_option("--kind", oracle_kind, "nav | max-space | multi (default: from extension)");
  oracle->add_option("--gamma", oracle_gamma);

  // plot
  auto* plot = app.add_subcommand("plot", "Render SVG plots from a metrics CSV");
  std::string plot_csv;
  std::string plot_out;
  std::size_t plot_window = 20;
  plot->add_option("--csv", plot_csv)->required();
  plot->add_option("--out", plot_out);
  plot->add_option("--window", plot_window);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*train) {
      std::map<std::string, std::string> overrides;
      for (const auto& [key, value] : flag_values) {
        if (train->count("--" + key) > 0) overrides[key] = value;
      }
      const std::string text = config_file.empty() ? std::string() : read_text_file(config_file);
      const RunConfig config = parse_config(text, overrides, mode_from_string(train_mode));
      if (config.mode != mode_from_string(train_mode)) throw ConfigError("config mode disagrees with subcommand");
      run(config, std::cout);
    } else if (*eval) {
      eval_opts.mode = mode_from_string(eval_mode);
      eval_opts.map = eval_map;
      evaluate(eval_opts, std::cout);
    } else if (*oracle) {
      std::optional<MapKind> kind;
      if (!oracle_kind.empty()) kind = map_kind_from_string(oracle_kind);
      return run_oracle(oracle_map, kind, oracle_gamma, std::cout);
    } else if (*plot) {
      const std::filesystem::path csv = plot_csv;
      plot_metrics(csv, plot_out.empty() ? csv.parent_path() : std::filesystem::path(plot_out), plot_window);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
