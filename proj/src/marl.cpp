#include "warehouse/marl.hpp"

#include <algorithm>
#include <stdexcept>

namespace warehouse {

MultiTrainResult train_multi(MultiAgentEnv& env, const Schedules& schedules, std::size_t episodes, Rng& rng) {
  if (episodes == 0) throw std::invalid_argument("episodes must be at least 1");
  schedules.validate();
  const std::size_t n = env.n_agents();
  MultiTrainResult result;
  for (std::size_t i = 0; i < n; ++i) result.learners.push_back(AgentLearner{i, QTable(env.n_states()), 1.0, 0.0});

  std::vector<Action> actions(n, Action::Up);
  std::vector<std::size_t> states(n);
  for (std::size_t e = 0; e < episodes; ++e) {
    for (auto& learner : result.learners) {
      learner.epsilon = epsilon_schedule(e, schedules);
      learner.alpha = alpha_schedule(e, schedules);
    }
    env.reset();
    std::vector<double> totals(n, 0.0);
    std::vector<EndReason> reasons(n, EndReason::Ongoing);
    while (!env.terminal()) {
      for (std::size_t i = 0; i < n; ++i) {
        if (!env.agents()[i].active) continue;
        auto& learner = result.learners[i];
        states[i] = env.state_index(i);
        actions[i] = epsilon_greedy_action(learner.table.row(states[i]), learner.epsilon, rng, schedules.tie_break);
      }
      std::vector<bool> was_active(n);
      for (std::size_t i = 0; i < n; ++i) was_active[i] = env.agents()[i].active;
      const auto outcomes = env.step(actions, rng);
      for (std::size_t i = 0; i < n; ++i) {
        if (!was_active[i]) continue;
        auto& learner = result.learners[i];
        const StepOutcome& out = outcomes[i];
        totals[i] += out.reward;
        q_update(learner.table, states[i], actions[i], out.reward, env.map().index(out.next_state), out.ends_task(),
                 schedules.gamma, learner.alpha);
        if (out.terminal) reasons[i] = out.reason;
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      TrainRow row;
      row.episode = e + 1;
      row.reward = totals[i];
      row.steps = env.agents()[i].steps;
      row.win = reasons[i] == EndReason::Goal ? 1 : 0;
      row.epsilon = result.learners[i].epsilon;
      row.alpha = result.learners[i].alpha;
      row.agent_id = i + 1;
      result.report.rows.push_back(row);
    }
    result.episode_steps.push_back(env.steps_taken());
  }
  return result;
}

MultiEvaluation evaluate_multi(const std::vector<AgentLearner>& learners, MultiAgentEnv& env, std::size_t trials,
                               bool freeze_humans, Rng& rng) {
  MultiEvaluation summary;
  if (trials == 0) return summary;
  const std::size_t n = env.n_agents();
  if (learners.size() != n) throw std::invalid_argument("one learner per agent required");
  summary.trials = trials;
  summary.agents.assign(n, {});
  const bool previous = env.freeze_humans();
  env.set_freeze_humans(freeze_humans);
  std::vector<Action> actions(n, Action::Up);
  double total_steps = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    env.reset();
    while (!env.terminal()) {
      for (std::size_t i = 0; i < n; ++i) {
        if (env.agents()[i].active) actions[i] = greedy_action(learners[i].table.row(env.state_index(i)), TieBreak::LowestIndex);
      }
      env.step(actions, rng);
    }
    for (std::size_t i = 0; i < n; ++i) {
      const AgentSlot& a = env.agents()[i];
      if (a.done_reason == EndReason::Goal) summary.agents[i].success += 1.0;
      if (a.done_reason == EndReason::Collision) summary.agents[i].collision += 1.0;
      summary.agents[i].mean_steps += static_cast<double>(a.steps);
    }
    total_steps += static_cast<double>(env.steps_taken());
  }
  env.set_freeze_humans(previous);
  const double k = static_cast<double>(trials);
  for (auto& a : summary.agents) {
    a.success /= k;
    a.collision /= k;
    a.mean_steps /= k;
  }
  summary.mean_episode_steps = total_steps / k;
  return summary;
}

std::vector<double> total_win_rate(const TrainReport& report, std::size_t n_agents) {
  if (n_agents == 0) throw std::invalid_argument("need at least one agent");
  std::vector<double> total;
  for (std::size_t i = 1; i <= n_agents; ++i) {
    const auto rate = win_rate_series(report.for_agent(i).wins());
    if (total.empty()) total.assign(rate.size(), 0.0);
    if (rate.size() != total.size()) throw std::invalid_argument("agents have different episode counts");
    for (std::size_t k = 0; k < rate.size(); ++k) total[k] += rate[k];
  }
  for (double& v : total) v /= static_cast<double>(n_agents);
  return total;
}

void save_learners(const std::vector<AgentLearner>& learners, const std::filesystem::path& dir) {
  for (const auto& l : learners) l.table.save(dir / ("q_agent" + std::to_string(l.id + 1) + ".csv"));
}

std::vector<AgentLearner> load_learners(const std::filesystem::path& dir, std::size_t n_agents) {
  std::vector<AgentLearner> out;
  for (std::size_t i = 0; i < n_agents; ++i) {
    out.push_back(AgentLearner{i, QTable::load(dir / ("q_agent" + std::to_string(i + 1) + ".csv")), 0.0, 0.0});
  }
  return out;
}

}  // namespace warehouse
