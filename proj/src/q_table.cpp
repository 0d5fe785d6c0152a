#include "warehouse/q_table.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

#include "warehouse/metrics.hpp"

namespace warehouse {

QTable::QTable(std::size_t n_states, std::size_t n_actions)
    : n_states_(n_states), n_actions_(n_actions), values_(n_states * n_actions, 0.0) {
  if (n_states == 0 || n_actions == 0) throw std::invalid_argument("QTable needs positive dimensions");
}

double QTable::max_value(std::size_t s) const {
  const auto r = row(s);
  return *std::max_element(r.begin(), r.end());
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw std::runtime_error("cannot format number");
  return std::string(buf, end);
}

std::string QTable::to_csv() const {
  std::string out;
  for (std::size_t s = 0; s < n_states_; ++s) {
    for (std::size_t a = 0; a < n_actions_; ++a) {
      if (a) out += ',';
      out += format_double(values_[s * n_actions_ + a]);
    }
    out += '\n';
  }
  return out;
}

QTable QTable::from_csv(std::string_view text) {
  std::vector<double> values;
  std::size_t rows = 0;
  std::size_t cols = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    std::size_t count = 0;
    while (true) {
      const auto comma = line.find(',');
      const std::string_view field = line.substr(0, comma);
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(v)) {
        throw std::runtime_error("bad Q-table value '" + std::string(field) + "'");
      }
      values.push_back(v);
      ++count;
      if (comma == std::string_view::npos) break;
      line = line.substr(comma + 1);
    }
    if (rows == 0) cols = count;
    if (count != cols) throw std::runtime_error("ragged Q-table row " + std::to_string(rows));
    ++rows;
  }
  if (rows == 0) throw std::runtime_error("empty Q-table file");
  QTable t(rows, cols);
  t.values_ = std::move(values);
  return t;
}

void QTable::save(const std::filesystem::path& path) const { write_text_file(path, to_csv()); }

QTable QTable::load(const std::filesystem::path& path) { return from_csv(read_text_file(path)); }

}  // namespace warehouse
