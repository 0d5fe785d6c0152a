#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "warehouse/grid.hpp"

namespace warehouse {

/// State x action value table. A state is a cell index (row * width + col).
class QTable {
 public:
  QTable() = default;
  explicit QTable(std::size_t n_states, std::size_t n_actions = kNumActions);

  std::size_t n_states() const { return n_states_; }
  std::size_t n_actions() const { return n_actions_; }

  double& at(std::size_t s, Action a) { return values_[s * n_actions_ + index_of(a)]; }
  double at(std::size_t s, Action a) const { return values_[s * n_actions_ + index_of(a)]; }

  std::span<const double> row(std::size_t s) const {
    return {values_.data() + s * n_actions_, n_actions_};
  }
  double max_value(std::size_t s) const;

  const std::vector<double>& values() const { return values_; }

  /// One line per state, one column per action, no header.
  std::string to_csv() const;
  static QTable from_csv(std::string_view text);
  void save(const std::filesystem::path& path) const;
  static QTable load(const std::filesystem::path& path);

  friend bool operator==(const QTable&, const QTable&) = default;

 private:
  std::size_t n_states_ = 0;
  std::size_t n_actions_ = kNumActions;
  std::vector<double> values_;
};

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

}  // namespace warehouse
