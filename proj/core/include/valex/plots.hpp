#pragma once

#include <string>
#include <vector>

#include "valex/corpus.hpp"
#include "valex/evaluation.hpp"

namespace valex {

/// Static SVG renderers. Output depends only on the inputs, so reruns are
/// byte-identical.

struct BarSeries {
  std::string name;
  std::vector<double> values;
};

/// Grouped vertical bars, one group per category.
std::string render_bar_svg(const std::string& title, const std::vector<std::string>& categories,
                           const std::vector<BarSeries>& series);

/// Per-value present/conflicted counts.
std::string render_value_counts_svg(const CorpusStats& stats);
/// Labels-per-video histogram.
std::string render_label_histogram_svg(const CorpusStats& stats);
/// One polygon per system over the value axes, scores in [0,1].
std::string render_radar_svg(const RadarSeries& radar);

}  // namespace valex
