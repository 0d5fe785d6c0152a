#pragma once

#include <span>
#include <vector>

#include "warehouse/env.hpp"
#include "warehouse/rng.hpp"

namespace warehouse {

struct AgentSlot {
  Position position;
  Position destination;
  bool active = true;
  EndReason done_reason = EndReason::Ongoing;
  std::size_t steps = 0;
};

/// Shared floor with several agents and wandering humans.
///
/// Agents resolve in index order each step. An agent collides (reward -1, out
/// of the episode, position unchanged) when it moves into a wall, off the
/// grid, onto a human, or onto a cell held by another active agent: the new
/// cell of a lower-index agent or the current cell of a higher-index one.
/// Two agents trying to swap therefore both collide, since an agent that
/// collides keeps its cell until the step is over. Reaching the own
/// destination pays +1 and also takes the agent out. Humans move after the
/// agents. Finished agents no longer occupy a cell.
class MultiAgentEnv {
 public:
  static constexpr std::size_t kDefaultStepCap = 200;

  explicit MultiAgentEnv(GridMap map, std::size_t step_cap = kDefaultStepCap);

  void reset();

  /// `actions` holds one entry per agent; entries of finished agents are
  /// ignored. Returns one outcome per agent.
  std::vector<StepOutcome> step(std::span<const Action> actions, Rng& rng);

  /// Moves every human once: each picks uniformly among staying and the
  /// adjacent open cells not held by an active agent, another human or a
  /// destination.
  const std::vector<Position>& advance_humans(Rng& rng);

  void set_freeze_humans(bool freeze) { freeze_humans_ = freeze; }
  bool freeze_humans() const { return freeze_humans_; }

  bool terminal() const { return terminal_; }
  std::size_t steps_taken() const { return steps_; }
  std::size_t step_cap() const { return step_cap_; }
  std::size_t n_agents() const { return agents_.size(); }
  const std::vector<AgentSlot>& agents() const { return agents_; }
  const std::vector<Position>& humans() const { return humans_; }
  const GridMap& map() const { return map_; }
  std::size_t n_states() const { return map_.size(); }
  std::size_t state_index(std::size_t agent) const { return map_.index(agents_[agent].position); }

  /// Test hook: place a human directly.
  void place_human(std::size_t i, Position p);

 private:
  bool occupied_by_agent(Position p, std::size_t except, const std::vector<bool>& present) const;

  GridMap map_;
  std::vector<AgentSlot> agents_;
  std::vector<Position> humans_;
  std::size_t steps_ = 0;
  std::size_t step_cap_;
  bool terminal_ = false;
  bool freeze_humans_ = false;
};

}  // namespace warehouse
