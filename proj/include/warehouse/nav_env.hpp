#pragma once

#include <vector>

#include "warehouse/env.hpp"

namespace warehouse {

/// Single-agent maze: 0 reward per free move, -1 and episode end on hitting an
/// obstacle or the grid edge, +1 on reaching the destination.
class NavEnv final : public SingleAgentEnv {
 public:
  /// step_cap 0 selects the default of 2 * height * width.
  explicit NavEnv(GridMap map, std::size_t step_cap = 0);

  std::unique_ptr<SingleAgentEnv> clone() const override {
    return std::make_unique<NavEnv>(*this);
  }

  Position reset() override;
  StepOutcome step(Action a) override;

  Position position() const override { return agent_; }
  bool terminal() const override { return terminal_; }
  std::size_t steps_taken() const override { return steps_; }
  std::size_t step_cap() const override { return step_cap_; }
  const GridMap& map() const override { return map_; }
  bool is_win(const StepOutcome& outcome) const override {
    return outcome.reason == EndReason::Goal;
  }
  void place_agent(Position p) override;

  Position start() const { return map_.start; }
  Position destination() const { return map_.destination; }

  /// Row-major scalar image of the map: open 1.0, obstacle 0.0, agent 0.5.
  std::vector<double> observe() const;

 private:
  GridMap map_;
  Position agent_;
  std::size_t steps_ = 0;
  std::size_t step_cap_;
  bool terminal_ = false;
};

std::vector<double> encode_nav_observation(const NavEnv& env);

}  // namespace warehouse
