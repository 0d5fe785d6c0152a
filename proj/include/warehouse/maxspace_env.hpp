#pragma once

#include <optional>
#include <vector>

#include "warehouse/env.hpp"

namespace warehouse {

/// Storage map: the object starts on the cell valued 1 and is carried to a
/// storage bay. The reward for a move is the value of the cell entered;
/// entering a bay ends the episode with reward equal to its capacity.
class MaxSpaceEnv final : public SingleAgentEnv {
 public:
  /// step_cap 0 selects the default of 2 * height * width.
  explicit MaxSpaceEnv(GridMap map, std::size_t step_cap = 0,
                       bool persist_capacity = false);

  std::unique_ptr<SingleAgentEnv> clone() const override {
    return std::make_unique<MaxSpaceEnv>(*this);
  }

  Position reset() override;
  StepOutcome step(Action a) override;

  Position position() const override { return agent_; }
  bool terminal() const override { return terminal_; }
  std::size_t steps_taken() const override { return steps_; }
  std::size_t step_cap() const override { return step_cap_; }
  const GridMap& map() const override { return map_; }
  /// A win is reaching the bay with the largest current capacity.
  bool is_win(const StepOutcome& outcome) const override;
  void place_agent(Position p) override;

  bool persist_capacity() const { return persist_; }
  void set_persist_capacity(bool persist) { persist_ = persist; }

  bool is_bay(Position p) const { return bays_[map_.index(p)]; }
  int capacity(Position p) const;
  Position largest_bay() const;
  /// Bay reached by the most recent episode, if it ended in one.
  std::optional<Position> last_bay() const { return last_bay_; }

  /// Stores one unit in the bay the last episode ended at; returns the map
  /// with that bay's capacity reduced by one.
  const GridMap& commit_storage();

  /// Overwrites the current capacity of a bay (used to resume a persisted
  /// evaluation state).
  void set_capacity(Position bay, int capacity);

 private:
  GridMap map_;
  std::vector<bool> bays_;
  Position agent_;
  std::size_t steps_ = 0;
  std::size_t step_cap_;
  bool persist_;
  bool terminal_ = false;
  std::optional<Position> last_bay_;
};

}  // namespace warehouse
