#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <vector>

#include "warehouse/grid.hpp"

namespace warehouse {

class StaleCacheError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct ForwardCache {
  /// activations[0] is the input; activations[l] the output of layer l.
  std::vector<std::vector<double>> activations;
  /// Pre-activation values of each layer.
  std::vector<std::vector<double>> pre;
  std::uint64_t generation = 0;
  const void* owner = nullptr;
};

/// Fully connected network: ReLU on hidden layers, identity on the output.
///
/// Parameters live in one flat vector in layer order. Within layer l the
/// weight matrix comes first, stored row-major as [out][in], followed by the
/// out biases.
class Mlp {
 public:
  Mlp() = default;
  /// Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero biases.
  Mlp(std::vector<std::size_t> dims, std::uint64_t seed);

  static Mlp zeros(std::vector<std::size_t> dims);
  static std::size_t parameter_count(const std::vector<std::size_t>& dims);

  const std::vector<std::size_t>& dims() const { return dims_; }
  std::size_t n_layers() const { return dims_.empty() ? 0 : dims_.size() - 1; }
  std::size_t input_size() const { return dims_.front(); }
  std::size_t output_size() const { return dims_.back(); }
  std::size_t size() const { return params_.size(); }

  std::span<const double> parameters() const { return params_; }
  /// Mutable access invalidates outstanding forward caches.
  std::span<double> mutable_parameters();
  void set_parameters(std::span<const double> p);

  std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }
  std::size_t bias_offset(std::size_t layer) const {
    return offsets_[layer] + dims_[layer] * dims_[layer + 1];
  }
  double weight(std::size_t layer, std::size_t out, std::size_t in) const {
    return params_[weight_offset(layer) + out * dims_[layer] + in];
  }
  double bias(std::size_t layer, std::size_t out) const { return params_[bias_offset(layer) + out]; }

  std::vector<double> forward(std::span<const double> x, ForwardCache* cache = nullptr) const;

  /// Gradient of (y - q[action])^2 with respect to every parameter, using a
  /// cache from forward() on the current parameters.
  std::vector<double> backward(const ForwardCache& cache, Action action, double y) const;
  /// Same, accumulated into `grad` scaled by `scale`.
  void accumulate_gradient(const ForwardCache& cache, Action action, double y, double scale,
                           std::span<double> grad) const;

  /// Squared error of the selected output.
  double loss(std::span<const double> x, Action action, double y) const;

  /// Parameter dump: a "dims" line, then one value per line in layer order.
  void save(const std::filesystem::path& path) const;
  static Mlp load(const std::filesystem::path& path);

  friend bool operator==(const Mlp& a, const Mlp& b) {
    return a.dims_ == b.dims_ && a.params_ == b.params_;
  }

 private:
  void layout(std::vector<std::size_t> dims);

  std::vector<std::size_t> dims_;
  std::vector<std::size_t> offsets_;
  std::vector<double> params_;
  std::uint64_t generation_ = 0;
};

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t t = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  AdamState() = default;
  explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}
};

/// One bias-corrected Adam update in place.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state, double lr);
void adam_step(Mlp& net, std::span<const double> grads, AdamState& state, double lr);

/// Central differences (L(p+h) - L(p-h)) / 2h for every parameter.
std::vector<double> finite_difference_gradients(const Mlp& net, std::span<const double> x, Action action,
                                                double y, double h);

/// ||a - b|| / (||a|| + ||b||), 0 when both are zero.
double gradient_relative_error(std::span<const double> a, std::span<const double> b);

}  // namespace warehouse
