#include "warehouse/nav_env.hpp"

namespace warehouse {

const char* to_string(EndReason reason) {
  switch (reason) {
    case EndReason::Ongoing: return "ongoing";
    case EndReason::Goal: return "goal";
    case EndReason::Collision: return "collision";
    case EndReason::StepLimit: return "step-limit";
  }
  return "?";
}

NavEnv::NavEnv(GridMap map, std::size_t step_cap)
    : map_(std::move(map)),
      agent_(map_.start),
      step_cap_(step_cap ? step_cap : 2 * map_.height * map_.width) {
  if (map_.kind != MapKind::Nav) throw MapError("NavEnv needs a nav map");
  validate_world(map_);
}

Position NavEnv::reset() {
  agent_ = map_.start;
  steps_ = 0;
  terminal_ = false;
  return agent_;
}

StepOutcome NavEnv::step(Action a) {
  if (terminal_) throw EnvError("step on a terminal NavEnv; call reset()");
  ++steps_;

  StepOutcome out;
  const auto next = neighbor(agent_, a, map_.height, map_.width);
  if (!next || !map_.is_open(*next)) {
    out.reward = -1.0;
    out.reason = EndReason::Collision;
  } else {
    agent_ = *next;
    if (agent_ == map_.destination) {
      out.reward = 1.0;
      out.reason = EndReason::Goal;
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

void NavEnv::place_agent(Position p) {
  if (!map_.is_transit(p)) throw EnvError("agent must be placed on an open cell");
  agent_ = p;
  terminal_ = p == map_.destination;
}

std::vector<double> NavEnv::observe() const {
  std::vector<double> obs(map_.size());
  for (std::size_t i = 0; i < obs.size(); ++i) {
    obs[i] = map_.cells[i] == kOpenCell ? 1.0 : 0.0;
  }
  obs[map_.index(agent_)] = 0.5;
  return obs;
}

std::vector<double> encode_nav_observation(const NavEnv& env) { return env.observe(); }

}  // namespace warehouse
