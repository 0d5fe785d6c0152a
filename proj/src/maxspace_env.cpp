#include "warehouse/maxspace_env.hpp"

namespace warehouse {

MaxSpaceEnv::MaxSpaceEnv(GridMap map, std::size_t step_cap, bool persist_capacity)
    : map_(std::move(map)),
      step_cap_(step_cap ? step_cap : 2 * map_.height * map_.width),
      persist_(persist_capacity) {
  if (map_.kind != MapKind::MaxSpace) throw MapError("MaxSpaceEnv needs a storage map");
  validate_world(map_);
  bays_.resize(map_.size());
  for (std::size_t i = 0; i < map_.size(); ++i) {
    const int v = map_.cells[i];
    bays_[i] = v == storage::kLargeBay || v == storage::kSmallBay;
  }
  // The object cell is an ordinary floor cell once the object has left it.
  agent_ = map_.start;
}

Position MaxSpaceEnv::reset() {
  agent_ = map_.start;
  steps_ = 0;
  terminal_ = false;
  last_bay_.reset();
  return agent_;
}

StepOutcome MaxSpaceEnv::step(Action a) {
  if (terminal_) throw EnvError("step on a terminal MaxSpaceEnv; call reset()");
  ++steps_;

  StepOutcome out;
  const auto next = neighbor(agent_, a, map_.height, map_.width);
  if (!next || map_.at(*next) == storage::kWall) {
    out.reward = static_cast<double>(storage::kWall);
    out.reason = EndReason::Collision;
  } else {
    agent_ = *next;
    if (is_bay(agent_)) {
      out.reward = static_cast<double>(map_.at(agent_));
      out.reason = EndReason::Goal;
      last_bay_ = agent_;
    } else {
      // Floor and the (vacated) object cell both cost one step.
      out.reward = static_cast<double>(storage::kOpen);
    }
  }
  if (out.reason == EndReason::Ongoing && steps_ >= step_cap_) {
    out.reason = EndReason::StepLimit;
  }
  out.next_state = agent_;
  out.terminal = out.reason != EndReason::Ongoing;
  terminal_ = out.terminal;
  return out;
}

bool MaxSpaceEnv::is_win(const StepOutcome& outcome) const {
  return outcome.reason == EndReason::Goal && outcome.next_state == largest_bay();
}

void MaxSpaceEnv::place_agent(Position p) {
  if (!map_.contains(p) || map_.at(p) == storage::kWall || is_bay(p)) {
    throw EnvError("agent must be placed on a floor cell");
  }
  agent_ = p;
  terminal_ = false;
}

int MaxSpaceEnv::capacity(Position p) const {
  if (!map_.contains(p) || !is_bay(p)) throw EnvError("not a storage bay");
  return map_.at(p);
}

Position MaxSpaceEnv::largest_bay() const {
  std::size_t best = map_.size();
  for (std::size_t i = 0; i < map_.size(); ++i) {
    if (bays_[i] && (best == map_.size() || map_.cells[i] > map_.cells[best])) best = i;
  }
  return map_.position_of(best);
}

const GridMap& MaxSpaceEnv::commit_storage() {
  if (!persist_) throw EnvError("commit_storage requires persist_capacity");
  if (!last_bay_) throw EnvError("last episode did not end at a storage bay");
  int& cell = map_.at(*last_bay_);
  if (cell <= 0) throw EnvError("storage bay is already full");
  --cell;
  return map_;
}

void MaxSpaceEnv::set_capacity(Position bay, int capacity) {
  if (!map_.contains(bay) || !is_bay(bay)) throw EnvError("not a storage bay");
  if (capacity < 0) throw EnvError("capacity cannot be negative");
  map_.at(bay) = capacity;
}

}  // namespace warehouse
