#include "warehouse/dqn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "warehouse/tabular.hpp"

namespace warehouse {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("replay capacity must be positive");
}

void ReplayBuffer::push(Experience e) {
  items_.push_back(std::move(e));
  if (items_.size() > capacity_) items_.pop_front();
}

std::vector<const Experience*> ReplayBuffer::sample(std::size_t batch, Rng& rng) const {
  if (batch > items_.size()) {
    throw std::invalid_argument("cannot sample " + std::to_string(batch) + " from " +
                                std::to_string(items_.size()) + " stored transitions");
  }
  std::vector<std::size_t> idx(items_.size());
  std::iota(idx.begin(), idx.end(), 0);
  // Partial Fisher-Yates: the first `batch` slots end up a uniform sample.
  for (std::size_t i = 0; i < batch; ++i) {
    std::swap(idx[i], idx[i + rng.index(idx.size() - i)]);
  }
  std::vector<const Experience*> out;
  out.reserve(batch);
  for (std::size_t i = 0; i < batch; ++i) out.push_back(&items_[idx[i]]);
  return out;
}

double compute_target(const Experience& e, const Mlp& net, double gamma) {
  if (e.terminal) return e.reward;
  const auto q = net.forward(e.next_state);
  return e.reward + gamma * *std::max_element(q.begin(), q.end());
}

void DqnConfig::validate() const {
  if (episodes == 0) throw std::invalid_argument("episodes must be at least 1");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must be in [0, 1)");
  if (batch_size == 0) throw std::invalid_argument("batch size must be at least 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw std::invalid_argument("learning rate must be positive");
  }
  if (replay_capacity < batch_size) throw std::invalid_argument("replay capacity must be at least the batch size");
  if (!(epsilon_floor >= 0.0 && epsilon_floor <= epsilon_init && epsilon_init <= 1.0)) {
    throw std::invalid_argument("epsilon must satisfy 0 <= floor <= init <= 1");
  }
  if (!(epsilon_decay > 0.0 && epsilon_decay <= 1.0)) throw std::invalid_argument("epsilon decay must be in (0, 1]");
  if (early_stop_window == 0) throw std::invalid_argument("early-stop window must be positive");
}

double epsilon_schedule(std::size_t episode, const DqnConfig& config) {
  return std::max(config.epsilon_floor,
                  config.epsilon_init * std::pow(config.epsilon_decay, static_cast<double>(episode)));
}

NavRollout greedy_rollout(const Mlp& net, NavEnv& env, std::size_t cap) {
  if (cap == 0) throw std::invalid_argument("rollout cap must be at least 1");
  NavRollout r;
  r.path.push_back(env.reset());
  while (!env.terminal() && r.steps() < cap) {
    const auto q = net.forward(env.observe());
    r.outcome = env.step(greedy_action(q, TieBreak::LowestIndex));
    r.path.push_back(env.position());
  }
  return r;
}

DqnResult train_nav_dqn(NavEnv& env, const DqnConfig& config, Rng& rng, std::uint64_t init_seed) {
  config.validate();
  const std::size_t n_in = env.map().size();
  std::vector<std::size_t> dims{n_in};
  for (std::size_t h : config.hidden) dims.push_back(h == 0 ? n_in : h);
  dims.push_back(kNumActions);

  DqnResult result{Mlp(dims, init_seed), {}, std::nullopt};
  Mlp& net = result.net;
  AdamState adam(net.size());
  ReplayBuffer memory(config.replay_capacity);
  std::vector<double> grad(net.size());
  ForwardCache cache;
  std::size_t recent_wins = 0;
  std::deque<int> window;

  for (std::size_t e = 0; e < config.episodes; ++e) {
    const double epsilon = epsilon_schedule(e, config);
    env.reset();
    double total = 0.0;
    double loss_sum = 0.0;
    std::size_t updates = 0;
    StepOutcome out;
    while (!env.terminal()) {
      std::vector<double> s = env.observe();
      const Action a = epsilon_greedy_action(net.forward(s), epsilon, rng);
      out = env.step(a);
      total += out.reward;
      memory.push(Experience{std::move(s), a, out.reward, env.observe(), out.ends_task()});
      if (memory.size() < config.batch_size) continue;

      const auto batch = memory.sample(config.batch_size, rng);
      std::fill(grad.begin(), grad.end(), 0.0);
      const double scale = 1.0 / static_cast<double>(batch.size());
      double batch_loss = 0.0;
      for (const Experience* x : batch) {
        const double y = compute_target(*x, net, config.gamma);
        const auto q = net.forward(x->state, &cache);
        const double d = y - q[index_of(x->action)];
        batch_loss += d * d;
        net.accumulate_gradient(cache, x->action, y, scale, grad);
      }
      adam_step(net, grad, adam, config.learning_rate);
      loss_sum += batch_loss * scale;
      ++updates;
    }

    TrainRow row;
    row.episode = e + 1;
    row.reward = total;
    row.steps = env.steps_taken();
    row.win = env.is_win(out) ? 1 : 0;
    if (updates > 0) row.loss_mean = loss_sum / static_cast<double>(updates);
    row.epsilon = epsilon;
    result.report.rows.push_back(row);

    window.push_back(row.win);
    recent_wins += static_cast<std::size_t>(row.win);
    if (window.size() > config.early_stop_window) {
      recent_wins -= static_cast<std::size_t>(window.front());
      window.pop_front();
    }
    if (config.early_stop && window.size() == config.early_stop_window &&
        recent_wins == config.early_stop_window) {
      NavEnv probe = env;
      const NavRollout check = greedy_rollout(net, probe, probe.step_cap());
      if (check.outcome.reason == EndReason::Goal) {
        result.early_stop_episode = e + 1;
        break;
      }
    }
  }
  return result;
}

}  // namespace warehouse
