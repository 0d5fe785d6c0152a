#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace warehouse {

/// One episode of training. For multi-agent runs there is one row per agent
/// per episode, distinguished by agent_id (1-based).
struct TrainRow {
  std::size_t episode = 0;
  double reward = 0.0;
  std::size_t steps = 0;
  int win = 0;
  std::optional<double> loss_mean;
  double epsilon = 0.0;
  std::optional<double> alpha;
  std::optional<std::size_t> agent_id;

  friend bool operator==(const TrainRow&, const TrainRow&) = default;
};

struct TrainReport {
  std::vector<TrainRow> rows;

  std::size_t size() const { return rows.size(); }
  bool empty() const { return rows.empty(); }

  /// Rows of one agent (or all rows when agent_id is nullopt).
  TrainReport for_agent(std::optional<std::size_t> agent_id) const;
  std::vector<double> rewards() const;
  std::vector<double> steps() const;
  std::vector<double> wins() const;
  std::vector<double> losses() const;  ///< absent losses are skipped

  /// Throws std::logic_error if episode numbers are not contiguous from 1 per
  /// agent or a win flag is not 0/1.
  void validate() const;

  friend bool operator==(const TrainReport&, const TrainReport&) = default;
};

/// n-term sliding mean; output[k] = mean(series[k .. k+n-1]).
std::vector<double> moving_average(const std::vector<double>& series, std::size_t n);

/// Cumulative win fraction: output[k-1] = (wins_1 + ... + wins_k) / k.
std::vector<double> win_rate_series(const std::vector<double>& wins);

/// Mean of the last `n` entries (all entries if fewer).
double trailing_mean(const std::vector<double>& series, std::size_t n);

/// Largest mean over any window of `n` consecutive entries; 0 if shorter.
double best_window_mean(const std::vector<double>& series, std::size_t n);

inline constexpr const char* kMetricsHeader =
    "episode,reward,steps,win,loss_mean,epsilon,alpha,agent_id";

std::string metrics_csv(const TrainReport& report);
TrainReport parse_metrics_csv(std::string_view text);
void write_metrics_csv(const TrainReport& report, const std::filesystem::path& path);
TrainReport read_metrics_csv(const std::filesystem::path& path);

struct PlotSeries {
  std::string label;
  std::vector<double> values;
  /// Draw a dark moving-average line over the light raw line.
  bool overlay = true;
};

struct PlotOptions {
  std::string title;
  std::string x_label = "episode";
  std::string y_label;
  std::size_t window = 20;
};

std::string render_line_plot_svg(const std::vector<PlotSeries>& series, const PlotOptions& options);
void render_line_plot(const std::vector<PlotSeries>& series, const PlotOptions& options,
                      const std::filesystem::path& path);

/// Writes `text` to `path` in binary mode; throws std::runtime_error on failure.
void write_text_file(const std::filesystem::path& path, std::string_view text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace warehouse
