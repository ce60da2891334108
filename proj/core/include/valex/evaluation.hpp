#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "valex/annotation_io.hpp"
#include "valex/label_space.hpp"

namespace valex {

struct LabelConfusion {
  LabelPair pair;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t support() const noexcept { return tp + fn; }
  std::size_t total() const noexcept { return tp + fp + fn + tn; }

  friend bool operator==(const LabelConfusion&, const LabelConfusion&) = default;
};

/// One confusion per retained pair, over the flattened vectors. Throws
/// Error(Alignment) listing the symmetric difference when the id sets differ.
std::vector<LabelConfusion> confusions(const GoldSet& predictions, const GoldSet& gold, const LabelSpace& space);

/// Element-wise sum of two confusion lists over the same pairs (for sharded
/// scoring). Associative and commutative.
std::vector<LabelConfusion> merge_confusions(std::span<const LabelConfusion> a, std::span<const LabelConfusion> b);

/// F1 = 2tp / (2tp + fp + fn), 0 when the denominator is 0.
double f_score(const LabelConfusion& c) noexcept;

enum class Partition : std::uint8_t { Present, Conflicted, All };
std::string_view to_string(Partition partition) noexcept;

struct AggregateScores {
  double weighted_f = 0.0;
  double macro_f = 0.0;
};

struct EvaluationReport {
  std::string system_id;
  std::size_t n_videos = 0;
  LabelSpace label_space;
  std::vector<LabelConfusion> confusions;
  std::map<LabelPair, double> per_label_f;
  std::map<Partition, AggregateScores> aggregates;
};

/// Macro = plain mean of per-label F over the partition's pairs; weighted =
/// mean weighted by gold support (0 when the partition has no support).
/// Throws Error(EmptyPartition) when a requested partition has no pairs.
EvaluationReport aggregate(std::string system_id, std::span<const LabelConfusion> confusions,
                           const LabelSpace& space, std::span<const Partition> partitions);

/// confusions() + aggregate() over every partition that has at least one
/// retained pair.
EvaluationReport evaluate(std::string system_id, const GoldSet& predictions, const GoldSet& gold,
                          const LabelSpace& space);

std::string format_report_json(const EvaluationReport& report);

struct ComparisonRow {
  std::string key;  // "ACHIEVEMENT+" or "weighted_f/present"
  std::vector<double> scores;
  std::size_t best = 0;  // first system holding the row maximum
};

struct ComparisonTable {
  std::vector<std::string> systems;
  std::vector<ComparisonRow> rows;
};

/// Per-label rows in label-space order, then aggregate rows. Throws
/// Error(IncompatibleReports) when label spaces differ and Error(EmptyInput)
/// for no reports.
ComparisonTable compare(std::span<const EvaluationReport> reports);
std::string format_comparison_csv(const ComparisonTable& table);

/// Radar data for one polarity: one axis per catalog value, one series per
/// system; pairs outside the label space plot as 0.
struct RadarSeries {
  Polarity polarity = Polarity::Present;
  std::vector<std::string> axes;
  std::vector<std::string> systems;
  std::vector<std::vector<double>> values;  // [system][axis]
};

RadarSeries radar_series(std::span<const EvaluationReport> reports, Polarity polarity);
std::string format_radar_tsv(const RadarSeries& radar);

}  // namespace valex
