#include "warehouse/mlp.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <random>
#include <string>

#include "warehouse/metrics.hpp"
#include "warehouse/q_table.hpp"

namespace warehouse {

namespace {
std::uint64_t next_generation() {
  static std::atomic<std::uint64_t> counter{0};
  return ++counter;
}
}  // namespace

std::size_t Mlp::parameter_count(const std::vector<std::size_t>& dims) {
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) n += dims[l] * dims[l + 1] + dims[l + 1];
  return n;
}

void Mlp::layout(std::vector<std::size_t> dims) {
  if (dims.size() < 2) throw std::invalid_argument("network needs at least input and output sizes");
  if (std::find(dims.begin(), dims.end(), 0u) != dims.end()) {
    throw std::invalid_argument("layer sizes must be positive");
  }
  dims_ = std::move(dims);
  offsets_.clear();
  std::size_t off = 0;
  for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
    offsets_.push_back(off);
    off += dims_[l] * dims_[l + 1] + dims_[l + 1];
  }
  params_.assign(off, 0.0);
  generation_ = next_generation();
}

Mlp::Mlp(std::vector<std::size_t> dims, std::uint64_t seed) {
  layout(std::move(dims));
  std::mt19937_64 engine(seed);
  for (std::size_t l = 0; l < n_layers(); ++l) {
    const double limit = std::sqrt(6.0 / static_cast<double>(dims_[l] + dims_[l + 1]));
    std::uniform_real_distribution<double> dist(-limit, limit);
    const std::size_t n_weights = dims_[l] * dims_[l + 1];
    for (std::size_t i = 0; i < n_weights; ++i) params_[offsets_[l] + i] = dist(engine);
  }
}

Mlp Mlp::zeros(std::vector<std::size_t> dims) {
  Mlp net;
  net.layout(std::move(dims));
  return net;
}

std::span<double> Mlp::mutable_parameters() {
  generation_ = next_generation();
  return params_;
}

void Mlp::set_parameters(std::span<const double> p) {
  if (p.size() != params_.size()) throw std::invalid_argument("parameter count mismatch");
  std::copy(p.begin(), p.end(), params_.begin());
  generation_ = next_generation();
}

std::vector<double> Mlp::forward(std::span<const double> x, ForwardCache* cache) const {
  if (dims_.empty()) throw std::logic_error("forward on an uninitialised network");
  if (x.size() != input_size()) {
    throw std::invalid_argument("input has " + std::to_string(x.size()) + " values, network expects " +
                                std::to_string(input_size()));
  }
  std::vector<double> a(x.begin(), x.end());
  if (cache) {
    cache->activations.assign(1, a);
    cache->pre.clear();
    cache->generation = generation_;
    cache->owner = this;
  }
  for (std::size_t l = 0; l < n_layers(); ++l) {
    const std::size_t in = dims_[l];
    const std::size_t out = dims_[l + 1];
    const double* w = params_.data() + weight_offset(l);
    const double* b = params_.data() + bias_offset(l);
    std::vector<double> z(out);
    for (std::size_t o = 0; o < out; ++o) {
      double sum = b[o];
      const double* row = w + o * in;
      for (std::size_t i = 0; i < in; ++i) sum += row[i] * a[i];
      z[o] = sum;
    }
    std::vector<double> act = z;
    if (l + 1 < n_layers()) {
      for (double& v : act) v = v > 0.0 ? v : 0.0;
    }
    if (cache) {
      cache->pre.push_back(std::move(z));
      cache->activations.push_back(act);
    }
    a = std::move(act);
  }
  return a;
}

void Mlp::accumulate_gradient(const ForwardCache& cache, Action action, double y, double scale,
                              std::span<double> grad) const {
  if (cache.owner != this || cache.generation != generation_ ||
      cache.activations.size() != dims_.size() || cache.pre.size() != n_layers()) {
    throw StaleCacheError("forward cache does not match the current parameters");
  }
  if (grad.size() != params_.size()) throw std::invalid_argument("gradient buffer size mismatch");
  const std::size_t a = index_of(action);
  if (a >= output_size()) throw std::invalid_argument("action outside the output layer");

  std::vector<double> delta(output_size(), 0.0);
  delta[a] = -2.0 * (y - cache.activations.back()[a]) * scale;
  for (std::size_t l = n_layers(); l-- > 0;) {
    const std::size_t in = dims_[l];
    const std::size_t out = dims_[l + 1];
    const std::vector<double>& prev = cache.activations[l];
    double* gw = grad.data() + weight_offset(l);
    double* gb = grad.data() + bias_offset(l);
    for (std::size_t o = 0; o < out; ++o) {
      const double d = delta[o];
      if (d == 0.0) continue;
      gb[o] += d;
      double* row = gw + o * in;
      for (std::size_t i = 0; i < in; ++i) row[i] += d * prev[i];
    }
    if (l == 0) break;
    std::vector<double> next(in, 0.0);
    const double* w = params_.data() + weight_offset(l);
    for (std::size_t o = 0; o < out; ++o) {
      const double d = delta[o];
      if (d == 0.0) continue;
      const double* row = w + o * in;
      for (std::size_t i = 0; i < in; ++i) next[i] += row[i] * d;
    }
    const std::vector<double>& z = cache.pre[l - 1];
    for (std::size_t i = 0; i < in; ++i) {
      if (z[i] <= 0.0) next[i] = 0.0;
    }
    delta = std::move(next);
  }
}

std::vector<double> Mlp::backward(const ForwardCache& cache, Action action, double y) const {
  std::vector<double> grad(params_.size(), 0.0);
  accumulate_gradient(cache, action, y, 1.0, grad);
  return grad;
}

double Mlp::loss(std::span<const double> x, Action action, double y) const {
  const auto q = forward(x);
  const double d = y - q.at(index_of(action));
  return d * d;
}

void Mlp::save(const std::filesystem::path& path) const {
  std::string out = "dims";
  for (std::size_t i = 0; i < dims_.size(); ++i) out += (i ? "," : " ") + std::to_string(dims_[i]);
  out += '\n';
  for (double p : params_) out += format_double(p) + '\n';
  write_text_file(path, out);
}

Mlp Mlp::load(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  std::size_t pos = text.find('\n');
  const std::string first = text.substr(0, pos);
  if (first.rfind("dims ", 0) != 0) throw std::runtime_error("parameter file must start with a dims line");
  std::vector<std::size_t> dims;
  std::string_view rest = std::string_view(first).substr(5);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const auto field = rest.substr(0, comma);
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size()) throw std::runtime_error("bad dims line");
    dims.push_back(v);
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
  }
  Mlp net = zeros(dims);
  std::vector<double> values;
  while (pos != std::string::npos && pos + 1 < text.size()) {
    const std::size_t end = text.find('\n', pos + 1);
    const std::string_view line(text.data() + pos + 1, (end == std::string::npos ? text.size() : end) - pos - 1);
    if (!line.empty()) {
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
      if (ec != std::errc{} || ptr != line.data() + line.size()) throw std::runtime_error("bad parameter value");
      values.push_back(v);
    }
    pos = end;
  }
  net.set_parameters(values);
  return net;
}

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state, double lr) {
  if (grads.size() != params.size()) throw std::invalid_argument("gradient size mismatch");
  if (state.m.empty() && state.v.empty()) {
    state.m.assign(params.size(), 0.0);
    state.v.assign(params.size(), 0.0);
  }
  if (state.m.size() != params.size() || state.v.size() != params.size()) {
    throw std::invalid_argument("optimizer state size mismatch");
  }
  ++state.t;
  const double t = static_cast<double>(state.t);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g;
    state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * g * g;
    const double m_hat = state.m[i] / c1;
    const double v_hat = state.v[i] / c2;
    params[i] -= lr * m_hat / (std::sqrt(v_hat) + state.eps);
  }
}

void adam_step(Mlp& net, std::span<const double> grads, AdamState& state, double lr) {
  adam_step(net.mutable_parameters(), grads, state, lr);
}

std::vector<double> finite_difference_gradients(const Mlp& net, std::span<const double> x, Action action,
                                                double y, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
  Mlp probe = net;
  std::vector<double> p(net.parameters().begin(), net.parameters().end());
  std::vector<double> grad(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double saved = p[i];
    p[i] = saved + h;
    probe.set_parameters(p);
    const double up = probe.loss(x, action, y);
    p[i] = saved - h;
    probe.set_parameters(p);
    const double down = probe.loss(x, action, y);
    p[i] = saved;
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

double gradient_relative_error(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("gradient size mismatch");
  double diff = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  const double denom = std::sqrt(na) + std::sqrt(nb);
  return denom == 0.0 ? 0.0 : std::sqrt(diff) / denom;
}

}  // namespace warehouse
