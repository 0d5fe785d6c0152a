#pragma once

#include <cstddef>
#include <memory>
#include <stdexcept>

#include "warehouse/grid.hpp"

namespace warehouse {

enum class EndReason { Ongoing, Goal, Collision, StepLimit };

const char* to_string(EndReason reason);

struct StepOutcome {
  double reward = 0.0;
  Position next_state;
  bool terminal = false;
  EndReason reason = EndReason::Ongoing;

  /// True when the transition ends the task itself; a step-limit cut-off is
  /// terminal for the episode but is not a terminal state for value targets.
  bool ends_task() const { return reason == EndReason::Goal || reason == EndReason::Collision; }
};

class EnvError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Common surface of the single-agent environments, used by the tabular
/// learner, rollouts and the oracle's model builder.
class SingleAgentEnv {
 public:
  virtual ~SingleAgentEnv() = default;

  virtual std::unique_ptr<SingleAgentEnv> clone() const = 0;

  virtual Position reset() = 0;
  virtual StepOutcome step(Action a) = 0;

  virtual Position position() const = 0;
  virtual bool terminal() const = 0;
  virtual std::size_t steps_taken() const = 0;
  virtual std::size_t step_cap() const = 0;
  virtual const GridMap& map() const = 0;

  /// Whether the finished episode counts as a win for win-rate accounting.
  virtual bool is_win(const StepOutcome& outcome) const = 0;

  /// Moves the agent to `p` without stepping. Used by the model builder and
  /// tests; p must be a cell the agent can stand on between steps.
  virtual void place_agent(Position p) = 0;

  std::size_t state_index() const { return map().index(position()); }
  std::size_t n_states() const { return map().size(); }
};

}  // namespace warehouse
