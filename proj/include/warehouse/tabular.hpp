#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "warehouse/env.hpp"
#include "warehouse/metrics.hpp"
#include "warehouse/q_table.hpp"
#include "warehouse/rng.hpp"

namespace warehouse {

/// How greedy selection picks among exactly equal maxima.
enum class TieBreak { LowestIndex, Random };

/// Exploration and update-factor schedules for the tabular learners.
/// Defaults: epsilon 1.0 decaying by 0.995 per episode to 0.05, update
/// factor 0.03 reduced by 0.002 per episode down to 0.001, discount 0.9.
struct Schedules {
  double epsilon_init = 1.0;
  double epsilon_floor = 0.05;
  double epsilon_decay = 0.995;
  double alpha_init = 0.03;
  double alpha_slope = 0.002;
  double alpha_floor = 0.001;
  double gamma = 0.90;
  TieBreak tie_break = TieBreak::LowestIndex;

  /// Storage-map training: the update factor is held at 0.03.
  static Schedules storage_defaults();
  /// Multi-agent training: epsilon decays by 0.97 per episode and ties
  /// between untried actions are broken at random.
  static Schedules multi_agent_defaults();

  /// Throws std::invalid_argument on out-of-range values.
  void validate() const;
};

double epsilon_schedule(std::size_t episode, const Schedules& s);
double alpha_schedule(std::size_t episode, const Schedules& s = {});

/// Index of the largest value; ties resolved per `tie_break` (Random draws
/// from `rng`, LowestIndex never touches it).
Action greedy_action(std::span<const double> q, TieBreak tie_break, Rng* rng = nullptr);

/// With probability epsilon a uniformly random action, otherwise greedy.
Action epsilon_greedy_action(std::span<const double> q, double epsilon, Rng& rng,
                             TieBreak tie_break = TieBreak::LowestIndex);

/// One Q-learning backup; returns the new Q(s, a).
double q_update(QTable& table, std::size_t s, Action a, double r, std::size_t s_next,
                bool terminal, double gamma, double alpha);

struct TabularResult {
  QTable table;
  TrainReport report;
};

/// Episodic Q-learning on any single-agent grid environment. Per step:
/// epsilon-greedy action, environment step, backup. Epsilon and the update
/// factor follow the per-episode schedules.
TabularResult train_tabular(SingleAgentEnv& env, const Schedules& schedules,
                            std::size_t episodes, Rng& rng);

class MaxSpaceEnv;
TabularResult train_maxspace(MaxSpaceEnv& env, const Schedules& schedules,
                             std::size_t episodes, Rng& rng);

/// Q-learning with fixed epsilon and update factor for an exact number of
/// environment steps, resetting whenever an episode ends.
QTable train_tabular_steps(SingleAgentEnv& env, double epsilon, double alpha, double gamma,
                           std::size_t steps, Rng& rng);

struct Rollout {
  std::vector<Position> path;  ///< starts with the reset cell
  StepOutcome outcome;
  std::size_t steps() const { return path.empty() ? 0 : path.size() - 1; }
};

/// Follows the greedy (lowest-index tie-break) policy from reset until the
/// episode ends or `cap` steps have been taken.
Rollout greedy_rollout(const QTable& table, SingleAgentEnv& env, std::size_t cap);

}  // namespace warehouse
