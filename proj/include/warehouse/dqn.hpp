#pragma once

#include <cstddef>
#include <deque>
#include <optional>
#include <vector>

#include "warehouse/metrics.hpp"
#include "warehouse/mlp.hpp"
#include "warehouse/nav_env.hpp"
#include "warehouse/rng.hpp"

namespace warehouse {

struct Experience {
  std::vector<double> state;
  Action action = Action::Up;
  double reward = 0.0;
  std::vector<double> next_state;
  bool terminal = false;

  friend bool operator==(const Experience&, const Experience&) = default;
};

/// Fixed-capacity FIFO memory; pushing past capacity drops the oldest entry.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity = 1000);

  void push(Experience e);
  /// `batch` distinct entries drawn uniformly without replacement.
  /// Throws std::invalid_argument when batch exceeds the current size.
  std::vector<const Experience*> sample(std::size_t batch, Rng& rng) const;

  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return items_.empty(); }
  const Experience& operator[](std::size_t i) const { return items_[i]; }
  const std::deque<Experience>& items() const { return items_; }

 private:
  std::size_t capacity_;
  std::deque<Experience> items_;
};

/// Bellman target: r for a task-ending transition, otherwise
/// r + gamma * max_a Q(next_state, a) using `net` itself.
double compute_target(const Experience& e, const Mlp& net, double gamma);

struct DqnConfig {
  std::size_t episodes = 500;
  double gamma = 0.90;
  std::size_t batch_size = 32;
  double learning_rate = 0.0025;
  std::size_t replay_capacity = 1000;
  double epsilon_init = 1.0;
  double epsilon_floor = 0.1;
  double epsilon_decay = 0.99;
  /// Hidden layer widths; 0 means "same as the input size".
  std::vector<std::size_t> hidden = {0, 0};
  bool early_stop = true;
  std::size_t early_stop_window = 10;
  std::size_t step_cap = 0;

  void validate() const;
};

/// Per-episode exploration rate: max(floor, init * decay^episode).
double epsilon_schedule(std::size_t episode, const DqnConfig& config = {});

struct DqnResult {
  Mlp net;
  TrainReport report;
  /// 1-based episode at which the early-stop rule fired.
  std::optional<std::size_t> early_stop_episode;
};

/// Deep Q-learning on the navigation maze. `rng` drives exploration and
/// replay sampling; the network is initialised from `init_seed`.
DqnResult train_nav_dqn(NavEnv& env, const DqnConfig& config, Rng& rng, std::uint64_t init_seed);

struct NavRollout {
  std::vector<Position> path;
  StepOutcome outcome;
  std::size_t steps() const { return path.empty() ? 0 : path.size() - 1; }
};

/// Greedy (argmax, lowest index on ties) rollout of the network from reset.
NavRollout greedy_rollout(const Mlp& net, NavEnv& env, std::size_t cap);

}  // namespace warehouse
