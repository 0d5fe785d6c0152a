#include "warehouse/tabular.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "warehouse/maxspace_env.hpp"

namespace warehouse {

Schedules Schedules::storage_defaults() {
  Schedules s;
  s.alpha_slope = 0.0;
  return s;
}

Schedules Schedules::multi_agent_defaults() {
  Schedules s;
  s.epsilon_decay = 0.97;
  s.tie_break = TieBreak::Random;
  return s;
}

void Schedules::validate() const {
  auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!unit(epsilon_init) || !unit(epsilon_floor) || epsilon_floor > epsilon_init) {
    throw std::invalid_argument("epsilon must satisfy 0 <= floor <= init <= 1");
  }
  if (!(epsilon_decay > 0.0 && epsilon_decay <= 1.0)) {
    throw std::invalid_argument("epsilon decay must be in (0, 1]");
  }
  if (!unit(alpha_init) || !unit(alpha_floor) || alpha_floor > alpha_init) {
    throw std::invalid_argument("alpha must satisfy 0 <= floor <= init <= 1");
  }
  if (!(alpha_slope >= 0.0) || !std::isfinite(alpha_slope)) {
    throw std::invalid_argument("alpha slope must be non-negative");
  }
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must be in [0, 1)");
}

double epsilon_schedule(std::size_t episode, const Schedules& s) {
  return std::max(s.epsilon_floor, s.epsilon_init * std::pow(s.epsilon_decay, static_cast<double>(episode)));
}

double alpha_schedule(std::size_t episode, const Schedules& s) {
  return std::max(s.alpha_floor, s.alpha_init - s.alpha_slope * static_cast<double>(episode));
}

Action greedy_action(std::span<const double> q, TieBreak tie_break, Rng* rng) {
  if (q.size() != kNumActions) throw std::invalid_argument("expected one value per action");
  const double best = *std::max_element(q.begin(), q.end());
  if (tie_break == TieBreak::LowestIndex || rng == nullptr) {
    return action_from_index(static_cast<std::size_t>(std::find(q.begin(), q.end(), best) - q.begin()));
  }
  std::size_t ties[kNumActions];
  std::size_t n = 0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] == best) ties[n++] = i;
  }
  return action_from_index(n == 1 ? ties[0] : ties[rng->index(n)]);
}

Action epsilon_greedy_action(std::span<const double> q, double epsilon, Rng& rng, TieBreak tie_break) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must be in [0, 1]");
  const double rho = rng.uniform();
  if (rho < epsilon) return action_from_index(rng.index(kNumActions));
  return greedy_action(q, tie_break, &rng);
}

double q_update(QTable& table, std::size_t s, Action a, double r, std::size_t s_next, bool terminal,
                double gamma, double alpha) {
  if (s >= table.n_states() || s_next >= table.n_states()) throw std::out_of_range("state index out of range");
  if (!std::isfinite(r) || !std::isfinite(gamma) || !std::isfinite(alpha)) {
    throw std::invalid_argument("q_update inputs must be finite");
  }
  const double target = terminal ? r : r + gamma * table.max_value(s_next);
  double& q = table.at(s, a);
  q += alpha * (target - q);
  if (!std::isfinite(q)) throw std::runtime_error("Q-value diverged");
  return q;
}

TabularResult train_tabular(SingleAgentEnv& env, const Schedules& schedules, std::size_t episodes, Rng& rng) {
  if (episodes == 0) throw std::invalid_argument("episodes must be at least 1");
  schedules.validate();
  TabularResult result{QTable(env.n_states()), {}};
  QTable& q = result.table;
  for (std::size_t e = 0; e < episodes; ++e) {
    const double epsilon = epsilon_schedule(e, schedules);
    const double alpha = alpha_schedule(e, schedules);
    env.reset();
    double total = 0.0;
    StepOutcome out;
    while (!env.terminal()) {
      const std::size_t s = env.state_index();
      const Action a = epsilon_greedy_action(q.row(s), epsilon, rng, schedules.tie_break);
      out = env.step(a);
      total += out.reward;
      q_update(q, s, a, out.reward, env.state_index(), out.ends_task(), schedules.gamma, alpha);
    }
    TrainRow row;
    row.episode = e + 1;
    row.reward = total;
    row.steps = env.steps_taken();
    row.win = env.is_win(out) ? 1 : 0;
    row.epsilon = epsilon;
    row.alpha = alpha;
    result.report.rows.push_back(row);
  }
  return result;
}

TabularResult train_maxspace(MaxSpaceEnv& env, const Schedules& schedules, std::size_t episodes, Rng& rng) {
  return train_tabular(env, schedules, episodes, rng);
}

QTable train_tabular_steps(SingleAgentEnv& env, double epsilon, double alpha, double gamma, std::size_t steps,
                           Rng& rng) {
  QTable q(env.n_states());
  env.reset();
  for (std::size_t i = 0; i < steps; ++i) {
    if (env.terminal()) env.reset();
    const std::size_t s = env.state_index();
    const Action a = epsilon_greedy_action(q.row(s), epsilon, rng);
    const StepOutcome out = env.step(a);
    q_update(q, s, a, out.reward, env.state_index(), out.ends_task(), gamma, alpha);
  }
  return q;
}

Rollout greedy_rollout(const QTable& table, SingleAgentEnv& env, std::size_t cap) {
  if (cap == 0) throw std::invalid_argument("rollout cap must be at least 1");
  Rollout r;
  r.path.push_back(env.reset());
  while (!env.terminal() && r.steps() < cap) {
    const Action a = greedy_action(table.row(env.state_index()), TieBreak::LowestIndex);
    r.outcome = env.step(a);
    r.path.push_back(env.position());
  }
  return r;
}

}  // namespace warehouse
