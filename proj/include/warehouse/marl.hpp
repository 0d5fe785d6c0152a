#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include "warehouse/metrics.hpp"
#include "warehouse/multi_env.hpp"
#include "warehouse/tabular.hpp"

namespace warehouse {

struct AgentLearner {
  std::size_t id = 0;  ///< 0-based agent index
  QTable table;
  double epsilon = 1.0;
  double alpha = 0.0;
};

struct MultiTrainResult {
  std::vector<AgentLearner> learners;
  /// One row per agent per episode; agent_id is 1-based.
  TrainReport report;
  /// Joint episode length (steps until every agent finished).
  std::vector<std::size_t> episode_steps;
};

/// Independent Q-learning: each agent picks epsilon-greedily from its own
/// table, the joint move is resolved by the environment, then each active
/// agent backs up its own transition.
MultiTrainResult train_multi(MultiAgentEnv& env, const Schedules& schedules, std::size_t episodes, Rng& rng);

struct AgentEvaluation {
  double success = 0.0;    ///< fraction of trials ending at the own destination
  double collision = 0.0;  ///< fraction of trials ending in a collision
  double mean_steps = 0.0; ///< mean active steps of the agent
};

struct MultiEvaluation {
  std::size_t trials = 0;
  std::vector<AgentEvaluation> agents;  ///< empty when trials == 0
  double mean_episode_steps = 0.0;
  bool empty() const { return trials == 0; }
};

/// Greedy joint rollouts. Humans still move (drawing from `rng`) unless frozen.
MultiEvaluation evaluate_multi(const std::vector<AgentLearner>& learners, MultiAgentEnv& env, std::size_t trials,
                               bool freeze_humans, Rng& rng);

/// Per-episode total win rate: mean over agents of each agent's cumulative
/// win rate.
std::vector<double> total_win_rate(const TrainReport& report, std::size_t n_agents);

/// Writes q_agent1.csv, q_agent2.csv, ... into `dir`.
void save_learners(const std::vector<AgentLearner>& learners, const std::filesystem::path& dir);
std::vector<AgentLearner> load_learners(const std::filesystem::path& dir, std::size_t n_agents);

}  // namespace warehouse
