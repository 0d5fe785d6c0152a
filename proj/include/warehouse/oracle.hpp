#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "warehouse/env.hpp"
#include "warehouse/grid.hpp"
#include "warehouse/q_table.hpp"

namespace warehouse {

/// Fewest 4-adjacent moves from `start` to `goal`, or nullopt when the goal
/// cannot be reached. Intermediate cells must be transit cells (open floor,
/// not a bay). Throws MapError if either endpoint is blocked.
std::optional<std::size_t> bfs_shortest_path(const GridMap& map, Position start, Position goal);

/// Deterministic finite MDP over cell indices.
struct MdpModel {
  std::size_t n_states = 0;
  double gamma = 0.9;
  /// next[s][a], reward[s][a], ends[s][a]: successor, reward, and whether the
  /// transition ends the task (no bootstrap).
  std::vector<std::array<std::size_t, kNumActions>> next;
  std::vector<std::array<double, kNumActions>> reward;
  std::vector<std::array<bool, kNumActions>> ends;
  /// States that are never entered between steps (blocked cells, goals).
  std::vector<bool> absorbing;
};

/// Builds the model by placing a copy of the environment on every standable
/// cell and stepping each action, so the model cannot drift from the env.
MdpModel build_mdp(const SingleAgentEnv& prototype, double gamma);

struct ValueIterationResult {
  QTable q_star;
  std::vector<Action> policy;  ///< greedy, lowest-index tie-break
  std::size_t iterations = 0;
  double residual = 0.0;
};

/// Bellman optimality iteration until the max-norm change drops below tol.
/// Throws std::invalid_argument if gamma is not in [0, 1) or tol <= 0.
ValueIterationResult value_iteration(const MdpModel& model, double tol = 1e-10);

/// Largest Bellman residual of a table against the model.
double bellman_residual(const MdpModel& model, const QTable& q);

/// Follows the value-iteration policy through the model from `start`; returns
/// the number of steps until a task-ending transition (nullopt on a loop or
/// if `cap` is exceeded), and the final state.
struct ModelRollout {
  std::optional<std::size_t> steps;
  std::size_t final_state = 0;
  double last_reward = 0.0;
};
ModelRollout rollout_policy(const MdpModel& model, const std::vector<Action>& policy, std::size_t start,
                            std::size_t cap);

/// Largest |a - b| over all entries; throws on a shape mismatch.
double max_abs_difference(const QTable& a, const QTable& b);

}  // namespace warehouse
