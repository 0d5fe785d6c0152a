#include "warehouse/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace warehouse {

std::optional<std::size_t> bfs_shortest_path(const GridMap& map, Position start, Position goal) {
  if (!map.is_open(start)) throw MapError("BFS start is on a blocked cell");
  if (!map.is_open(goal)) throw MapError("BFS goal is on a blocked cell");
  if (start == goal) return 0;
  std::vector<std::size_t> dist(map.size(), SIZE_MAX);
  std::deque<Position> frontier{start};
  dist[map.index(start)] = 0;
  while (!frontier.empty()) {
    const Position p = frontier.front();
    frontier.pop_front();
    for (Action a : kAllActions) {
      const auto n = neighbor(p, a, map.height, map.width);
      if (!n || dist[map.index(*n)] != SIZE_MAX) continue;
      if (*n == goal) return dist[map.index(p)] + 1;
      if (!map.is_transit(*n)) continue;
      dist[map.index(*n)] = dist[map.index(p)] + 1;
      frontier.push_back(*n);
    }
  }
  return std::nullopt;
}

MdpModel build_mdp(const SingleAgentEnv& prototype, double gamma) {
  const GridMap& map = prototype.map();
  MdpModel m;
  m.n_states = map.size();
  m.gamma = gamma;
  m.next.resize(m.n_states);
  m.reward.resize(m.n_states);
  m.ends.resize(m.n_states);
  m.absorbing.assign(m.n_states, true);
  for (std::size_t s = 0; s < m.n_states; ++s) {
    for (std::size_t a = 0; a < kNumActions; ++a) {
      m.next[s][a] = s;
      m.reward[s][a] = 0.0;
      m.ends[s][a] = true;
    }
    auto probe = prototype.clone();
    probe->reset();
    try {
      probe->place_agent(map.position_of(s));
    } catch (const EnvError&) {
      continue;
    }
    if (probe->terminal()) continue;
    m.absorbing[s] = false;
    for (Action a : kAllActions) {
      auto env = prototype.clone();
      env->reset();
      env->place_agent(map.position_of(s));
      const StepOutcome out = env->step(a);
      m.next[s][index_of(a)] = map.index(out.next_state);
      m.reward[s][index_of(a)] = out.reward;
      m.ends[s][index_of(a)] = out.ends_task();
    }
  }
  return m;
}

namespace {

double backup(const MdpModel& m, const QTable& q, std::size_t s, std::size_t a) {
  const double r = m.reward[s][a];
  return m.ends[s][a] ? r : r + m.gamma * q.max_value(m.next[s][a]);
}

}  // namespace

double bellman_residual(const MdpModel& model, const QTable& q) {
  double worst = 0.0;
  for (std::size_t s = 0; s < model.n_states; ++s) {
    if (model.absorbing[s]) continue;
    for (std::size_t a = 0; a < kNumActions; ++a) {
      worst = std::max(worst, std::abs(backup(model, q, s, a) - q.at(s, action_from_index(a))));
    }
  }
  return worst;
}

ValueIterationResult value_iteration(const MdpModel& model, double tol) {
  if (!(model.gamma >= 0.0 && model.gamma < 1.0)) {
    throw std::invalid_argument("value iteration needs gamma in [0, 1)");
  }
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  ValueIterationResult r{QTable(model.n_states), {}, 0, 0.0};
  QTable next = r.q_star;
  while (true) {
    double delta = 0.0;
    for (std::size_t s = 0; s < model.n_states; ++s) {
      if (model.absorbing[s]) continue;
      for (std::size_t a = 0; a < kNumActions; ++a) {
        const double v = backup(model, r.q_star, s, a);
        delta = std::max(delta, std::abs(v - r.q_star.at(s, action_from_index(a))));
        next.at(s, action_from_index(a)) = v;
      }
    }
    std::swap(r.q_star, next);
    ++r.iterations;
    if (delta < tol) break;
  }
  r.residual = bellman_residual(model, r.q_star);
  r.policy.reserve(model.n_states);
  for (std::size_t s = 0; s < model.n_states; ++s) {
    const auto row = r.q_star.row(s);
    r.policy.push_back(action_from_index(
        static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin())));
  }
  return r;
}

ModelRollout rollout_policy(const MdpModel& model, const std::vector<Action>& policy, std::size_t start,
                            std::size_t cap) {
  ModelRollout out;
  std::size_t s = start;
  for (std::size_t t = 1; t <= cap; ++t) {
    const std::size_t a = index_of(policy.at(s));
    out.last_reward = model.reward[s][a];
    const bool ends = model.ends[s][a];
    s = model.next[s][a];
    if (ends) {
      out.steps = t;
      break;
    }
  }
  out.final_state = s;
  return out;
}

double max_abs_difference(const QTable& a, const QTable& b) {
  if (a.n_states() != b.n_states() || a.n_actions() != b.n_actions()) {
    throw std::invalid_argument("Q-table shapes differ");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) {
    worst = std::max(worst, std::abs(a.values()[i] - b.values()[i]));
  }
  return worst;
}

}  // namespace warehouse
