#include "warehouse/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <ostream>
#include <sstream>

#include "warehouse/dqn.hpp"
#include "warehouse/marl.hpp"
#include "warehouse/maxspace_env.hpp"
#include "warehouse/metrics.hpp"
#include "warehouse/multi_env.hpp"
#include "warehouse/nav_env.hpp"
#include "warehouse/oracle.hpp"
#include "warehouse/tabular.hpp"

#ifndef WAREHOUSE_DATA_DIR
#define WAREHOUSE_DATA_DIR "data"
#endif

namespace warehouse {

const char* to_string(Mode mode) {
  switch (mode) {
    case Mode::NavDqn: return "nav-dqn";
    case Mode::MaxSpace: return "max-space";
    case Mode::Multi: return "multi";
  }
  return "?";
}

Mode mode_from_string(std::string_view name) {
  if (name == "nav-dqn" || name == "nav") return Mode::NavDqn;
  if (name == "max-space") return Mode::MaxSpace;
  if (name == "multi") return Mode::Multi;
  throw ConfigError("unknown mode '" + std::string(name) + "' (expected nav-dqn, max-space or multi)");
}

std::filesystem::path data_dir() {
  if (const char* env = std::getenv("WAREHOUSE_DATA_DIR"); env && *env) return env;
  return WAREHOUSE_DATA_DIR;
}

std::filesystem::path default_map(Mode mode) {
  switch (mode) {
    case Mode::NavDqn: return data_dir() / "maps" / "nav_8x8.map";
    case Mode::MaxSpace: return data_dir() / "maps" / "storage_12x12.csv";
    case Mode::Multi: return data_dir() / "maps" / "lobby.scene";
  }
  return {};
}

namespace {

MapKind map_kind_of(Mode mode) {
  switch (mode) {
    case Mode::NavDqn: return MapKind::Nav;
    case Mode::MaxSpace: return MapKind::MaxSpace;
    case Mode::Multi: return MapKind::MultiScene;
  }
  return MapKind::Nav;
}

}  // namespace

RunConfig RunConfig::defaults(Mode mode) {
  RunConfig c;
  c.mode = mode;
  c.map = default_map(mode);
  switch (mode) {
    case Mode::NavDqn:
      break;
    case Mode::MaxSpace: {
      const Schedules s = Schedules::storage_defaults();
      c.episodes = 1000;
      c.epsilon_floor = s.epsilon_floor;
      c.epsilon_decay = s.epsilon_decay;
      c.alpha_slope = s.alpha_slope;
      break;
    }
    case Mode::Multi: {
      const Schedules s = Schedules::multi_agent_defaults();
      c.episodes = 100;
      c.epsilon_floor = s.epsilon_floor;
      c.epsilon_decay = s.epsilon_decay;
      c.step_cap = MultiAgentEnv::kDefaultStepCap;
      break;
    }
  }
  c.out = std::filesystem::path("runs") / to_string(mode);
  return c;
}

void RunConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (episodes == 0) fail("episodes must be at least 1");
  if (!(gamma >= 0.0 && gamma < 1.0)) fail("gamma must be in [0, 1)");
  if (batch_size == 0) fail("batch_size must be at least 1");
  if (!(learning_rate > 0.0 && std::isfinite(learning_rate))) fail("learning_rate must be positive");
  if (replay_capacity < batch_size) fail("replay_capacity must be at least batch_size");
  if (!(epsilon_init >= 0.0 && epsilon_init <= 1.0)) fail("epsilon_init must be in [0, 1]");
  if (!(epsilon_floor >= 0.0 && epsilon_floor <= epsilon_init)) fail("epsilon_floor must be in [0, epsilon_init]");
  if (!(epsilon_decay > 0.0 && epsilon_decay <= 1.0)) fail("epsilon_decay must be in (0, 1]");
  if (!(alpha_init >= 0.0 && alpha_init <= 1.0)) fail("alpha_init must be in [0, 1]");
  if (!(alpha_floor >= 0.0 && alpha_floor <= alpha_init)) fail("alpha_floor must be in [0, alpha_init]");
  if (!(alpha_slope >= 0.0 && std::isfinite(alpha_slope))) fail("alpha_slope must be non-negative");
  for (std::size_t h : hidden) {
    if (h > 4096) fail("hidden layer width too large");
  }
  if (map.empty() || !std::filesystem::exists(map)) fail("map file not found: " + map.string());
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "mode",          "map",           "episodes",      "seed",       "out",         "gamma",
      "batch_size",    "learning_rate", "replay_capacity", "hidden",   "early_stop",  "epsilon_init",
      "epsilon_floor", "epsilon_decay", "alpha_init",    "alpha_slope", "alpha_floor", "step_cap"};
  return keys;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_value(const std::string& key, const std::string& text) {
  T v{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ConfigError("invalid value '" + text + "' for " + key);
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("invalid value '" + text + "' for " + key + " (expected true or false)");
}

std::vector<std::size_t> parse_list(const std::string& key, const std::string& text) {
  std::vector<std::size_t> out;
  std::string_view rest = text;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    out.push_back(parse_value<std::size_t>(key, std::string(trim(rest.substr(0, comma)))));
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
  }
  if (out.empty()) throw ConfigError(key + " needs at least one layer width");
  return out;
}

void apply(RunConfig& c, const std::string& key, const std::string& value) {
  if (key == "mode") c.mode = mode_from_string(value);
  else if (key == "map") c.map = value;
  else if (key == "episodes") c.episodes = parse_value<std::size_t>(key, value);
  else if (key == "seed") c.seed = parse_value<std::uint64_t>(key, value);
  else if (key == "out") c.out = value;
  else if (key == "gamma") c.gamma = parse_value<double>(key, value);
  else if (key == "batch_size") c.batch_size = parse_value<std::size_t>(key, value);
  else if (key == "learning_rate") c.learning_rate = parse_value<double>(key, value);
  else if (key == "replay_capacity") c.replay_capacity = parse_value<std::size_t>(key, value);
  else if (key == "hidden") c.hidden = parse_list(key, value);
  else if (key == "early_stop") c.early_stop = parse_bool(key, value);
  else if (key == "epsilon_init") c.epsilon_init = parse_value<double>(key, value);
  else if (key == "epsilon_floor") c.epsilon_floor = parse_value<double>(key, value);
  else if (key == "epsilon_decay") c.epsilon_decay = parse_value<double>(key, value);
  else if (key == "alpha_init") c.alpha_init = parse_value<double>(key, value);
  else if (key == "alpha_slope") c.alpha_slope = parse_value<double>(key, value);
  else if (key == "alpha_floor") c.alpha_floor = parse_value<double>(key, value);
  else if (key == "step_cap") c.step_cap = parse_value<std::size_t>(key, value);
  else throw ConfigError("unknown config key '" + key + "'");
}

}  // namespace

RunConfig parse_config(std::string_view text, const std::map<std::string, std::string>& overrides,
                       std::optional<Mode> mode_hint) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    std::string key(trim(line.substr(0, eq)));
    const auto& keys = config_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw ConfigError("unknown config key '" + key + "' on line " + std::to_string(line_no));
    }
    entries.emplace_back(std::move(key), std::string(trim(line.substr(eq + 1))));
  }
  for (const auto& [key, value] : overrides) {
    const auto& keys = config_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw ConfigError("unknown config key '" + key + "'");
    }
    entries.emplace_back(key, value);
  }

  std::optional<Mode> mode = mode_hint;
  for (const auto& [key, value] : entries) {
    if (key == "mode") mode = mode_from_string(value);
  }
  if (!mode) throw ConfigError("no mode given (nav-dqn, max-space or multi)");

  RunConfig c = RunConfig::defaults(*mode);
  for (const auto& [key, value] : entries) apply(c, key, value);
  c.mode = *mode;
  c.validate();
  return c;
}

std::string config_echo(const RunConfig& c) {
  std::string hidden;
  for (std::size_t i = 0; i < c.hidden.size(); ++i) hidden += (i ? "," : "") + std::to_string(c.hidden[i]);
  std::ostringstream out;
  out << "mode = " << to_string(c.mode) << '\n'
      << "map = " << c.map.string() << '\n'
      << "episodes = " << c.episodes << '\n'
      << "seed = " << c.seed << '\n'
      << "out = " << c.out.string() << '\n'
      << "gamma = " << format_double(c.gamma) << '\n'
      << "batch_size = " << c.batch_size << '\n'
      << "learning_rate = " << format_double(c.learning_rate) << '\n'
      << "replay_capacity = " << c.replay_capacity << '\n'
      << "hidden = " << hidden << '\n'
      << "early_stop = " << (c.early_stop ? "true" : "false") << '\n'
      << "epsilon_init = " << format_double(c.epsilon_init) << '\n'
      << "epsilon_floor = " << format_double(c.epsilon_floor) << '\n'
      << "epsilon_decay = " << format_double(c.epsilon_decay) << '\n'
      << "alpha_init = " << format_double(c.alpha_init) << '\n'
      << "alpha_slope = " << format_double(c.alpha_slope) << '\n'
      << "alpha_floor = " << format_double(c.alpha_floor) << '\n'
      << "step_cap = " << c.step_cap << '\n';
  return out.str();
}

std::string RunSummary::line() const {
  std::ostringstream out;
  out << "episodes=" << episodes_run << " final_win_rate=" << format_double(final_win_rate)
      << " trailing_steps=" << format_double(trailing_steps) << " early_stop=";
  if (early_stop_episode) out << *early_stop_episode;
  else out << "none";
  return out.str();
}

namespace {

Schedules schedules_of(const RunConfig& c) {
  Schedules s;
  s.epsilon_init = c.epsilon_init;
  s.epsilon_floor = c.epsilon_floor;
  s.epsilon_decay = c.epsilon_decay;
  s.alpha_init = c.alpha_init;
  s.alpha_slope = c.alpha_slope;
  s.alpha_floor = c.alpha_floor;
  s.gamma = c.gamma;
  if (c.mode == Mode::Multi) s.tie_break = Schedules::multi_agent_defaults().tie_break;
  return s;
}

constexpr std::size_t kTrailing = 20;

void write_single_agent_plots(const TrainReport& report, const std::filesystem::path& dir, std::size_t window) {
  PlotOptions o;
  o.window = window;
  o.title = "Reward per episode";
  o.y_label = "reward";
  render_line_plot({{"reward", report.rewards(), true}}, o, dir / "reward.svg");
  o.title = "Steps per episode";
  o.y_label = "steps";
  render_line_plot({{"steps", report.steps(), true}}, o, dir / "steps.svg");
  o.title = "Win rate";
  o.y_label = "win rate";
  render_line_plot({{"win rate", win_rate_series(report.wins()), false}}, o, dir / "win_rate.svg");
  const auto losses = report.losses();
  if (!losses.empty()) {
    o.title = "Loss per episode";
    o.y_label = "mean loss";
    render_line_plot({{"loss", losses, true}}, o, dir / "loss.svg");
  }
}

std::vector<std::size_t> agent_ids(const TrainReport& report) {
  std::vector<std::size_t> ids;
  for (const auto& r : report.rows) {
    if (r.agent_id && std::find(ids.begin(), ids.end(), *r.agent_id) == ids.end()) ids.push_back(*r.agent_id);
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::vector<double> joint_steps(const TrainReport& report, const std::vector<std::size_t>& ids) {
  std::vector<double> steps;
  for (std::size_t id : ids) {
    const auto s = report.for_agent(id).steps();
    if (steps.empty()) steps.assign(s.size(), 0.0);
    for (std::size_t k = 0; k < s.size() && k < steps.size(); ++k) steps[k] = std::max(steps[k], s[k]);
  }
  return steps;
}

void write_multi_agent_plots(const TrainReport& report, const std::filesystem::path& dir, std::size_t window) {
  const auto ids = agent_ids(report);
  PlotOptions o;
  o.window = window;
  o.title = "Win rate per agent";
  o.y_label = "win rate";
  std::vector<PlotSeries> rates;
  for (std::size_t id : ids) {
    rates.push_back({"agent " + std::to_string(id), win_rate_series(report.for_agent(id).wins()), false});
  }
  rates.push_back({"total", total_win_rate(report, ids.size()), false});
  render_line_plot(rates, o, dir / "win_rate.svg");
  o.title = "Steps per episode";
  o.y_label = "steps";
  render_line_plot({{"steps", joint_steps(report, ids), true}}, o, dir / "steps.svg");
  o.title = "Reward per episode";
  o.y_label = "reward";
  std::vector<PlotSeries> rewards;
  for (std::size_t id : ids) rewards.push_back({"agent " + std::to_string(id), report.for_agent(id).rewards(), true});
  render_line_plot(rewards, o, dir / "reward.svg");
}

}  // namespace

void plot_metrics(const std::filesystem::path& csv, const std::filesystem::path& out_dir, std::size_t window) {
  const TrainReport report = read_metrics_csv(csv);
  if (report.empty()) throw std::runtime_error("metrics file has no rows: " + csv.string());
  std::filesystem::create_directories(out_dir);
  if (agent_ids(report).empty()) write_single_agent_plots(report, out_dir, window);
  else write_multi_agent_plots(report, out_dir, window);
}

RunSummary run(const RunConfig& config, std::ostream& log) {
  config.validate();
  std::filesystem::create_directories(config.out);
  write_text_file(config.out / "config.txt", config_echo(config));
  const GridMap map = load_world(config.map, map_kind_of(config.mode));
  Rng rng(config.seed);
  RunSummary summary;
  TrainReport report;

  switch (config.mode) {
    case Mode::NavDqn: {
      NavEnv env(map, config.step_cap);
      DqnConfig dc;
      dc.episodes = config.episodes;
      dc.gamma = config.gamma;
      dc.batch_size = config.batch_size;
      dc.learning_rate = config.learning_rate;
      dc.replay_capacity = config.replay_capacity;
      dc.epsilon_init = config.epsilon_init;
      dc.epsilon_floor = config.epsilon_floor;
      dc.epsilon_decay = config.epsilon_decay;
      dc.hidden = config.hidden;
      dc.early_stop = config.early_stop;
      auto result = train_nav_dqn(env, dc, rng, config.seed + 1);
      result.net.save(config.out / "params.txt");
      report = std::move(result.report);
      summary.early_stop_episode = result.early_stop_episode;
      break;
    }
    case Mode::MaxSpace: {
      MaxSpaceEnv env(map, config.step_cap);
      auto result = train_maxspace(env, schedules_of(config), config.episodes, rng);
      result.table.save(config.out / "q_table.csv");
      report = std::move(result.report);
      break;
    }
    case Mode::Multi: {
      MultiAgentEnv env(map, config.step_cap == 0 ? MultiAgentEnv::kDefaultStepCap : config.step_cap);
      auto result = train_multi(env, schedules_of(config), config.episodes, rng);
      save_learners(result.learners, config.out);
      report = std::move(result.report);
      break;
    }
  }

  write_metrics_csv(report, config.out / "metrics.csv");
  const auto ids = agent_ids(report);
  if (ids.empty()) {
    write_single_agent_plots(report, config.out, kTrailing);
    summary.episodes_run = report.size();
    summary.final_win_rate = win_rate_series(report.wins()).back();
    summary.trailing_steps = trailing_mean(report.steps(), kTrailing);
  } else {
    write_multi_agent_plots(report, config.out, kTrailing);
    summary.episodes_run = report.size() / ids.size();
    summary.final_win_rate = total_win_rate(report, ids.size()).back();
    summary.trailing_steps = trailing_mean(joint_steps(report, ids), kTrailing);
  }
  log << to_string(config.mode) << ": " << summary.line() << '\n';
  return summary;
}

std::string EvalSummary::line() const {
  std::ostringstream out;
  out << "reason=" << to_string(reason) << " reward=" << format_double(reward) << " steps=" << steps;
  for (std::size_t i = 0; i < success.size(); ++i) {
    out << " agent" << (i + 1) << "_success=" << format_double(success[i]);
  }
  return out.str();
}

namespace {

constexpr const char* kCapacityFile = "capacity_state.txt";

void load_capacities(MaxSpaceEnv& env, const std::filesystem::path& file) {
  std::istringstream in(read_text_file(file));
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::size_t row = 0, col = 0;
    int cap = 0;
    char c1 = 0, c2 = 0;
    std::istringstream fields(line);
    if (!(fields >> row >> c1 >> col >> c2 >> cap) || c1 != ',' || c2 != ',') {
      throw std::runtime_error("bad line in " + file.string() + ": " + line);
    }
    env.set_capacity({row, col}, cap);
  }
}

void save_capacities(const MaxSpaceEnv& env, const std::filesystem::path& file) {
  std::string out;
  const GridMap& m = env.map();
  for (std::size_t i = 0; i < m.size(); ++i) {
    const Position p = m.position_of(i);
    if (env.is_bay(p)) out += std::to_string(p.row) + "," + std::to_string(p.col) + "," + std::to_string(m.at(p)) + "\n";
  }
  write_text_file(file, out);
}

}  // namespace

EvalSummary evaluate(const EvalOptions& options, std::ostream& log) {
  const std::filesystem::path map_path = options.map.empty() ? default_map(options.mode) : options.map;
  const GridMap map = load_world(map_path, map_kind_of(options.mode));
  EvalSummary summary;
  switch (options.mode) {
    case Mode::NavDqn: {
      const Mlp net = Mlp::load(options.dir / "params.txt");
      NavEnv env(map);
      const NavRollout r = greedy_rollout(net, env, env.step_cap());
      summary.reason = r.outcome.reason;
      summary.reward = r.outcome.reward;
      summary.steps = r.steps();
      break;
    }
    case Mode::MaxSpace: {
      const QTable table = QTable::load(options.dir / "q_table.csv");
      MaxSpaceEnv env(map, 0, options.persist);
      const auto state = options.dir / kCapacityFile;
      if (options.persist && std::filesystem::exists(state)) load_capacities(env, state);
      const Rollout r = greedy_rollout(table, env, env.step_cap());
      summary.reason = r.outcome.reason;
      summary.reward = r.outcome.reward;
      summary.steps = r.steps();
      if (options.persist && env.last_bay()) {
        env.commit_storage();
        save_capacities(env, state);
      }
      break;
    }
    case Mode::Multi: {
      MultiAgentEnv env(map);
      const auto learners = load_learners(options.dir, env.n_agents());
      Rng rng(options.seed + 2);
      const MultiEvaluation e = evaluate_multi(learners, env, options.trials, options.freeze_humans, rng);
      summary.steps = static_cast<std::size_t>(std::lround(e.mean_episode_steps));
      for (const auto& a : e.agents) summary.success.push_back(a.success);
      const bool all = !e.agents.empty() && std::all_of(e.agents.begin(), e.agents.end(),
                                                        [](const AgentEvaluation& a) { return a.success == 1.0; });
      summary.reason = all ? EndReason::Goal : EndReason::Collision;
      break;
    }
  }
  log << "eval " << to_string(options.mode) << ": " << summary.line() << '\n';
  return summary;
}

MapKind guess_map_kind(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".csv") return MapKind::MaxSpace;
  if (ext == ".scene") return MapKind::MultiScene;
  return MapKind::Nav;
}

int run_oracle(const std::filesystem::path& map_path, std::optional<MapKind> kind, double gamma, std::ostream& out) {
  const MapKind k = kind ? *kind : guess_map_kind(map_path);
  const GridMap map = load_world(map_path, k);
  out << "map " << map_path.string() << " (" << to_string(k) << ", " << map.height << "x" << map.width << ")\n";
  if (k == MapKind::MultiScene) {
    std::size_t sum = 0;
    for (std::size_t i = 0; i < map.agent_starts.size(); ++i) {
      const auto d = bfs_shortest_path(map, map.agent_starts[i], map.destinations[i]);
      out << "agent " << (i + 1) << " bfs=" << (d ? std::to_string(*d) : "unreachable") << '\n';
      if (d) sum += *d;
    }
    out << "combined bfs=" << sum << '\n';
    return 0;
  }

  std::unique_ptr<SingleAgentEnv> env;
  Position goal;
  if (k == MapKind::Nav) {
    env = std::make_unique<NavEnv>(map);
    goal = map.destination;
  } else {
    env = std::make_unique<MaxSpaceEnv>(map);
    goal = largest_bay(map);
  }
  const auto bfs = bfs_shortest_path(map, map.start, goal);
  const MdpModel model = build_mdp(*env, gamma);
  const ValueIterationResult vi = value_iteration(model);
  const ModelRollout roll = rollout_policy(model, vi.policy, map.index(map.start), map.size());
  const auto start_row = vi.q_star.row(map.index(map.start));
  out << "bfs=" << (bfs ? std::to_string(*bfs) : "unreachable") << '\n';
  out << "value_iteration rollout=" << (roll.steps ? std::to_string(*roll.steps) : "none") << " ends_at=("
      << map.position_of(roll.final_state).row << "," << map.position_of(roll.final_state).col << ")"
      << " iterations=" << vi.iterations << " residual=" << format_double(vi.residual) << '\n';
  out << "q_star(start) =";
  for (Action a : kAllActions) out << ' ' << to_string(a) << ':' << format_double(start_row[index_of(a)]);
  out << '\n';
  const bool agree = bfs && roll.steps && *bfs == *roll.steps && map.position_of(roll.final_state) == goal;
  out << (agree ? "agree" : "DISAGREE") << '\n';
  return agree ? 0 : 1;
}

}  // namespace warehouse
