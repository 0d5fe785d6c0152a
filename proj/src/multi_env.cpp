#include "warehouse/multi_env.hpp"

#include <algorithm>

namespace warehouse {

MultiAgentEnv::MultiAgentEnv(GridMap map, std::size_t step_cap)
    : map_(std::move(map)), step_cap_(step_cap) {
  if (map_.kind != MapKind::MultiScene) throw MapError("MultiAgentEnv needs a scene map");
  if (step_cap_ == 0) throw EnvError("step cap must be positive");
  validate_world(map_);
  reset();
}

void MultiAgentEnv::reset() {
  agents_.clear();
  for (std::size_t i = 0; i < map_.agent_starts.size(); ++i) {
    agents_.push_back(AgentSlot{map_.agent_starts[i], map_.destinations[i], true,
                                EndReason::Ongoing, 0});
  }
  humans_ = map_.human_starts;
  steps_ = 0;
  terminal_ = false;
}

bool MultiAgentEnv::occupied_by_agent(Position p, std::size_t except, const std::vector<bool>& present) const {
  for (std::size_t j = 0; j < agents_.size(); ++j) {
    if (j != except && present[j] && agents_[j].position == p) return true;
  }
  return false;
}

std::vector<StepOutcome> MultiAgentEnv::step(std::span<const Action> actions, Rng& rng) {
  if (terminal_) throw EnvError("step on a terminal MultiAgentEnv; call reset()");
  if (actions.size() != agents_.size()) {
    throw std::invalid_argument("expected " + std::to_string(agents_.size()) +
                                " actions, got " + std::to_string(actions.size()));
  }
  ++steps_;

  // Agents that finish during this step still hold their cell until it ends.
  std::vector<bool> present(agents_.size());
  for (std::size_t j = 0; j < agents_.size(); ++j) present[j] = agents_[j].active;

  std::vector<StepOutcome> outcomes(agents_.size());
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    AgentSlot& agent = agents_[i];
    StepOutcome& out = outcomes[i];
    if (!agent.active) {
      out.next_state = agent.position;
      out.terminal = true;
      out.reason = agent.done_reason;
      continue;
    }
    ++agent.steps;

    const auto next = neighbor(agent.position, actions[i], map_.height, map_.width);
    const bool blocked = !next || !map_.is_open(*next) ||
                         std::find(humans_.begin(), humans_.end(), *next) != humans_.end() ||
                         occupied_by_agent(*next, i, present);
    if (blocked) {
      out.reward = -1.0;
      out.reason = EndReason::Collision;
    } else {
      agent.position = *next;
      if (agent.position == agent.destination) {
        out.reward = 1.0;
        out.reason = EndReason::Goal;
      }
    }
    out.next_state = agent.position;
    if (out.reason != EndReason::Ongoing) {
      agent.active = false;
      agent.done_reason = out.reason;
    }
  }

  if (!freeze_humans_) advance_humans(rng);

  const bool any_active =
      std::any_of(agents_.begin(), agents_.end(), [](const AgentSlot& a) { return a.active; });
  if (any_active && steps_ >= step_cap_) {
    for (std::size_t i = 0; i < agents_.size(); ++i) {
      if (!agents_[i].active) continue;
      agents_[i].active = false;
      agents_[i].done_reason = EndReason::StepLimit;
      outcomes[i].reason = EndReason::StepLimit;
    }
  }
  for (auto& out : outcomes) out.terminal = out.reason != EndReason::Ongoing;
  terminal_ = std::none_of(agents_.begin(), agents_.end(),
                           [](const AgentSlot& a) { return a.active; });
  return outcomes;
}

const std::vector<Position>& MultiAgentEnv::advance_humans(Rng& rng) {
  std::vector<Position> options;
  std::vector<bool> present(agents_.size());
  for (std::size_t j = 0; j < agents_.size(); ++j) present[j] = agents_[j].active;
  for (std::size_t h = 0; h < humans_.size(); ++h) {
    options.assign(1, humans_[h]);
    for (Action a : kAllActions) {
      const auto next = neighbor(humans_[h], a, map_.height, map_.width);
      if (!next || !map_.is_open(*next)) continue;
      if (occupied_by_agent(*next, agents_.size(), present)) continue;
      if (std::find(humans_.begin(), humans_.end(), *next) != humans_.end()) continue;
      if (std::find(map_.destinations.begin(), map_.destinations.end(), *next) !=
          map_.destinations.end()) {
        continue;
      }
      options.push_back(*next);
    }
    humans_[h] = options[rng.index(options.size())];
  }
  return humans_;
}

void MultiAgentEnv::place_human(std::size_t i, Position p) {
  if (!map_.is_open(p)) throw EnvError("human must be placed on an open cell");
  humans_.at(i) = p;
}

}  // namespace warehouse
