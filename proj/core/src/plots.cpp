#include "valex/plots.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

namespace valex {

namespace {

constexpr std::array<std::string_view, 6> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string escape(std::string_view s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string header(int width, int height, std::string_view title) {
  return fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\" "
      "font-family=\"sans-serif\" font-size=\"11\">\n"
      "<rect width=\"{0}\" height=\"{1}\" fill=\"white\"/>\n"
      "<text x=\"{2}\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">{3}</text>\n",
      width, height, width / 2, escape(title));
}

}  // namespace

std::string render_bar_svg(const std::string& title, const std::vector<std::string>& categories,
                           const std::vector<BarSeries>& series) {
  constexpr int left = 50, top = 35, bottom = 120, plot_h = 300, group_w = 36;
  const int width = left + 20 + group_w * static_cast<int>(std::max<std::size_t>(categories.size(), 1));
  const int height = top + plot_h + bottom;
  double max_v = 0.0;
  for (const auto& s : series) {
    for (const double v : s.values) max_v = std::max(max_v, v);
  }
  if (max_v <= 0.0) max_v = 1.0;

  std::string svg = header(width, height, title);
  const int base = top + plot_h;
  svg += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>\n", left, top, base);
  svg += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>\n", left, base, width - 10);
  for (int tick = 0; tick <= 4; ++tick) {
    const double v = max_v * tick / 4.0;
    const double y = base - plot_h * tick / 4.0;
    svg += fmt::format("<text x=\"{}\" y=\"{:.1f}\" text-anchor=\"end\">{:.4g}</text>\n", left - 4, y + 4, v);
  }
  const auto n_series = std::max<std::size_t>(series.size(), 1);
  const double bar_w = (group_w - 6.0) / static_cast<double>(n_series);
  for (std::size_t c = 0; c < categories.size(); ++c) {
    const double gx = left + 3.0 + group_w * static_cast<double>(c);
    for (std::size_t s = 0; s < series.size(); ++s) {
      const double v = c < series[s].values.size() ? series[s].values[c] : 0.0;
      const double h = plot_h * v / max_v;
      svg += fmt::format("<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{:.1f}\" height=\"{:.1f}\" fill=\"{}\"/>\n",
                         gx + bar_w * static_cast<double>(s), base - h, bar_w, h, kPalette[s % kPalette.size()]);
    }
    const double cx = gx + group_w / 2.0;
    svg += fmt::format("<text x=\"{0:.1f}\" y=\"{1}\" transform=\"rotate(60 {0:.1f} {1})\">{2}</text>\n", cx, base + 8,
                       escape(categories[c]));
  }
  for (std::size_t s = 0; s < series.size(); ++s) {
    const int y = top + 12 * static_cast<int>(s);
    svg += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"10\" height=\"10\" fill=\"{}\"/>\n", width - 150, y,
                       kPalette[s % kPalette.size()]);
    svg += fmt::format("<text x=\"{}\" y=\"{}\">{}</text>\n", width - 136, y + 9, escape(series[s].name));
  }
  svg += "</svg>\n";
  return svg;
}

std::string render_value_counts_svg(const CorpusStats& stats) {
  std::vector<std::string> names;
  BarSeries present{"present", {}}, conflicted{"conflicted", {}};
  for (std::size_t v = 0; v < kValueCount; ++v) {
    names.push_back(value_catalog()[v].name);
    present.values.push_back(static_cast<double>(stats.count({v, Polarity::Present})));
    conflicted.values.push_back(static_cast<double>(stats.count({v, Polarity::Conflicted})));
  }
  return render_bar_svg("Value occurrences", names, {present, conflicted});
}

std::string render_label_histogram_svg(const CorpusStats& stats) {
  std::vector<std::string> bins;
  BarSeries videos{"videos", {}};
  const std::size_t max_bin = stats.labels_per_video_histogram.empty() ? 0 : stats.labels_per_video_histogram.rbegin()->first;
  for (std::size_t k = 0; k <= max_bin; ++k) {
    bins.push_back(std::to_string(k));
    const auto it = stats.labels_per_video_histogram.find(k);
    videos.values.push_back(it == stats.labels_per_video_histogram.end() ? 0.0 : static_cast<double>(it->second));
  }
  return render_bar_svg("Labels per video", bins, {videos});
}

std::string render_radar_svg(const RadarSeries& radar) {
  constexpr int size = 560;
  constexpr double cx = size / 2.0, cy = size / 2.0 + 10, radius = 190.0;
  std::string svg = header(size, size + 20, radar.polarity == Polarity::Present ? "F-score per value (present)"
                                                                                 : "F-score per value (conflicted)");
  const auto n = radar.axes.size();
  auto point = [&](std::size_t axis, double r) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(axis) / static_cast<double>(n) - std::numbers::pi / 2;
    return std::pair{cx + r * std::cos(angle), cy + r * std::sin(angle)};
  };
  if (n == 0) return svg + "</svg>\n";
  for (int ring = 1; ring <= 4; ++ring) {
    std::string pts;
    for (std::size_t a = 0; a < n; ++a) {
      const auto [x, y] = point(a, radius * ring / 4.0);
      pts += fmt::format("{:.1f},{:.1f} ", x, y);
    }
    svg += fmt::format("<polygon points=\"{}\" fill=\"none\" stroke=\"#cccccc\"/>\n", pts);
  }
  for (std::size_t a = 0; a < n; ++a) {
    const auto [x, y] = point(a, radius);
    const auto [lx, ly] = point(a, radius + 22);
    svg += fmt::format("<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"#cccccc\"/>\n", cx, cy, x, y);
    svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\" font-size=\"9\">{}</text>\n", lx, ly,
                       escape(radar.axes[a]));
  }
  for (std::size_t s = 0; s < radar.systems.size(); ++s) {
    std::string pts;
    for (std::size_t a = 0; a < n; ++a) {
      const auto [x, y] = point(a, radius * std::clamp(radar.values[s][a], 0.0, 1.0));
      pts += fmt::format("{:.1f},{:.1f} ", x, y);
    }
    const auto color = kPalette[s % kPalette.size()];
    svg += fmt::format("<polygon points=\"{}\" fill=\"{}\" fill-opacity=\"0.15\" stroke=\"{}\"/>\n", pts, color, color);
    svg += fmt::format("<rect x=\"10\" y=\"{}\" width=\"10\" height=\"10\" fill=\"{}\"/>\n", 30 + 14 * s, color);
    svg += fmt::format("<text x=\"24\" y=\"{}\">{}</text>\n", 39 + 14 * s, escape(radar.systems[s]));
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace valex
