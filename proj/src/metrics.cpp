#include "warehouse/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "warehouse/q_table.hpp"

namespace warehouse {

TrainReport TrainReport::for_agent(std::optional<std::size_t> agent_id) const {
  if (!agent_id) return *this;
  TrainReport out;
  for (const auto& r : rows) {
    if (r.agent_id == agent_id) out.rows.push_back(r);
  }
  return out;
}

std::vector<double> TrainReport::rewards() const {
  std::vector<double> out;
  for (const auto& r : rows) out.push_back(r.reward);
  return out;
}

std::vector<double> TrainReport::steps() const {
  std::vector<double> out;
  for (const auto& r : rows) out.push_back(static_cast<double>(r.steps));
  return out;
}

std::vector<double> TrainReport::wins() const {
  std::vector<double> out;
  for (const auto& r : rows) out.push_back(r.win);
  return out;
}

std::vector<double> TrainReport::losses() const {
  std::vector<double> out;
  for (const auto& r : rows) {
    if (r.loss_mean) out.push_back(*r.loss_mean);
  }
  return out;
}

void TrainReport::validate() const {
  std::map<std::optional<std::size_t>, std::size_t> last;
  for (const auto& r : rows) {
    if (r.win != 0 && r.win != 1) throw std::logic_error("win flag must be 0 or 1");
    auto& prev = last[r.agent_id];
    if (r.episode != prev + 1) throw std::logic_error("episode numbers must be contiguous from 1");
    prev = r.episode;
  }
}

std::vector<double> moving_average(const std::vector<double>& series, std::size_t n) {
  if (n == 0) throw std::invalid_argument("moving average window must be positive");
  if (n > series.size()) throw std::invalid_argument("moving average window longer than series");
  std::vector<double> out;
  out.reserve(series.size() - n + 1);
  for (std::size_t k = 0; k + n <= series.size(); ++k) {
    // Summed fresh per window so results are exact for short integer windows.
    double sum = 0.0;
    for (std::size_t i = k; i < k + n; ++i) sum += series[i];
    out.push_back(sum / static_cast<double>(n));
  }
  return out;
}

std::vector<double> win_rate_series(const std::vector<double>& wins) {
  if (wins.empty()) throw std::invalid_argument("win-rate series of an empty list");
  std::vector<double> out;
  out.reserve(wins.size());
  double total = 0.0;
  for (std::size_t k = 0; k < wins.size(); ++k) {
    total += wins[k];
    out.push_back(total / static_cast<double>(k + 1));
  }
  return out;
}

double trailing_mean(const std::vector<double>& series, std::size_t n) {
  if (series.empty() || n == 0) return 0.0;
  const std::size_t m = std::min(n, series.size());
  const double sum = std::accumulate(series.end() - static_cast<std::ptrdiff_t>(m), series.end(), 0.0);
  return sum / static_cast<double>(m);
}

double best_window_mean(const std::vector<double>& series, std::size_t n) {
  if (n == 0 || series.size() < n) return 0.0;
  const auto ma = moving_average(series, n);
  return *std::max_element(ma.begin(), ma.end());
}

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  while (true) {
    const auto pos = line.find(sep);
    out.push_back(line.substr(0, pos));
    if (pos == std::string_view::npos) break;
    line = line.substr(pos + 1);
  }
  return out;
}

template <typename T>
T parse_number(std::string_view field, const char* what) {
  T v{};
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw std::runtime_error(std::string("bad ") + what + " '" + std::string(field) + "'");
  }
  return v;
}

}  // namespace

std::string metrics_csv(const TrainReport& report) {
  std::string out = kMetricsHeader;
  out += '\n';
  for (const auto& r : report.rows) {
    out += std::to_string(r.episode);
    out += ',' + format_double(r.reward);
    out += ',' + std::to_string(r.steps);
    out += ',' + std::to_string(r.win);
    out += ',' + (r.loss_mean ? format_double(*r.loss_mean) : std::string());
    out += ',' + format_double(r.epsilon);
    out += ',' + (r.alpha ? format_double(*r.alpha) : std::string());
    out += ',' + (r.agent_id ? std::to_string(*r.agent_id) : std::string());
    out += '\n';
  }
  return out;
}

TrainReport parse_metrics_csv(std::string_view text) {
  TrainReport report;
  bool header = true;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (header) {
      if (line != kMetricsHeader) throw std::runtime_error("unexpected metrics header");
      header = false;
      continue;
    }
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 8) {
      throw std::runtime_error("metrics line " + std::to_string(line_no) + ": expected 8 fields");
    }
    TrainRow r;
    r.episode = parse_number<std::size_t>(f[0], "episode");
    r.reward = parse_number<double>(f[1], "reward");
    r.steps = parse_number<std::size_t>(f[2], "steps");
    r.win = parse_number<int>(f[3], "win");
    if (!f[4].empty()) r.loss_mean = parse_number<double>(f[4], "loss_mean");
    r.epsilon = parse_number<double>(f[5], "epsilon");
    if (!f[6].empty()) r.alpha = parse_number<double>(f[6], "alpha");
    if (!f[7].empty()) r.agent_id = parse_number<std::size_t>(f[7], "agent_id");
    report.rows.push_back(r);
  }
  if (header) throw std::runtime_error("metrics file has no header");
  return report;
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_metrics_csv(const TrainReport& report, const std::filesystem::path& path) {
  write_text_file(path, metrics_csv(report));
}

TrainReport read_metrics_csv(const std::filesystem::path& path) {
  return parse_metrics_csv(read_text_file(path));
}

namespace {

constexpr double kWidth = 800;
constexpr double kHeight = 480;
constexpr double kLeft = 70;
constexpr double kRight = 160;
constexpr double kTop = 40;
constexpr double kBottom = 60;

const char* const kDark[] = {"#1f4e9c", "#b3261e", "#2e7d32", "#6a1b9a", "#ef6c00"};
const char* const kLight[] = {"#a9c1ea", "#efb1ac", "#a8d5aa", "#d3b2e0", "#ffcc99"};

std::string fmt(double v) {
  // Fixed two decimals keeps the SVG small and stable.
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_line_plot_svg(const std::vector<PlotSeries>& series, const PlotOptions& options) {
  if (series.empty()) throw std::invalid_argument("plot needs at least one series");
  double lo = INFINITY, hi = -INFINITY;
  std::size_t longest = 0;
  for (const auto& s : series) {
    if (s.values.empty()) throw std::invalid_argument("plot series '" + s.label + "' is empty");
    for (double v : s.values) {
      if (!std::isfinite(v)) throw std::invalid_argument("plot series '" + s.label + "' is not finite");
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    longest = std::max(longest, s.values.size());
  }
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  const double x_span = longest > 1 ? static_cast<double>(longest - 1) : 1.0;
  auto px = [&](double i) { return kLeft + plot_w * i / x_span; };
  auto py = [&](double v) { return kTop + plot_h * (1.0 - (v - lo) / (hi - lo)); };

  auto polyline = [&](const std::vector<double>& v, double offset, const char* color, double width) {
    std::string pts;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) pts += ' ';
      pts += fmt(px(static_cast<double>(i) + offset)) + ',' + fmt(py(v[i]));
    }
    return "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"" +
           fmt(width) + "\" points=\"" + pts + "\"/>\n";
  };

  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(kWidth) +
                    "\" height=\"" + fmt(kHeight) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + fmt(kWidth / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" +
         escape(options.title) + "</text>\n";
  svg += "<rect x=\"" + fmt(kLeft) + "\" y=\"" + fmt(kTop) + "\" width=\"" + fmt(plot_w) +
         "\" height=\"" + fmt(plot_h) + "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double v = lo + (hi - lo) * t / 4.0;
    svg += "<text x=\"" + fmt(kLeft - 6) + "\" y=\"" + fmt(py(v) + 4) + "\" text-anchor=\"end\">" +
           fmt(v) + "</text>\n";
  }
  svg += "<text x=\"" + fmt(kLeft) + "\" y=\"" + fmt(kTop + plot_h + 18) + "\">1</text>\n";
  svg += "<text x=\"" + fmt(kLeft + plot_w) + "\" y=\"" + fmt(kTop + plot_h + 18) +
         "\" text-anchor=\"end\">" + std::to_string(longest) + "</text>\n";
  svg += "<text x=\"" + fmt(kLeft + plot_w / 2) + "\" y=\"" + fmt(kHeight - 18) +
         "\" text-anchor=\"middle\">" + escape(options.x_label) + "</text>\n";
  svg += "<text transform=\"translate(18," + fmt(kTop + plot_h / 2) +
         ") rotate(-90)\" text-anchor=\"middle\">" + escape(options.y_label) + "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* dark = kDark[k % std::size(kDark)];
    const char* light = kLight[k % std::size(kLight)];
    if (s.overlay) {
      svg += polyline(s.values, 0.0, light, 1.0);
      const std::size_t n = std::min(options.window == 0 ? 1 : options.window, s.values.size());
      // The smoothed point k covers episodes k..k+n-1; plot it at the window end.
      svg += polyline(moving_average(s.values, n), static_cast<double>(n - 1), dark, 2.0);
    } else {
      svg += polyline(s.values, 0.0, dark, 2.0);
    }
    const double ly = kTop + 16.0 + 18.0 * static_cast<double>(k);
    svg += "<line x1=\"" + fmt(kWidth - kRight + 12) + "\" y1=\"" + fmt(ly - 4) + "\" x2=\"" +
           fmt(kWidth - kRight + 32) + "\" y2=\"" + fmt(ly - 4) + "\" stroke=\"" + dark +
           "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + fmt(kWidth - kRight + 38) + "\" y=\"" + fmt(ly) + "\">" + escape(s.label) +
           "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

void render_line_plot(const std::vector<PlotSeries>& series, const PlotOptions& options,
                      const std::filesystem::path& path) {
  write_text_file(path, render_line_plot_svg(series, options));
}

}  // namespace warehouse
