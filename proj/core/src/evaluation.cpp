#include "valex/evaluation.hpp"

#include <algorithm>
#include <array>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

#include "valex/error.hpp"

namespace valex {

std::vector<LabelConfusion> confusions(const GoldSet& predictions, const GoldSet& gold, const LabelSpace& space) {
  std::vector<std::string> only_pred, only_gold;
  for (const auto& [id, v] : predictions) {
    if (!gold.contains(id)) only_pred.push_back(id);
  }
  for (const auto& [id, v] : gold) {
    if (!predictions.contains(id)) only_gold.push_back(id);
  }
  if (!only_pred.empty() || !only_gold.empty()) {
    throw Error(ErrorCode::Alignment, fmt::format("predictions and gold cover different videos; "
                                                  "only in predictions: [{}]; only in gold: [{}]",
                                                  fmt::join(only_pred, ", "), fmt::join(only_gold, ", ")));
  }
  std::vector<LabelConfusion> out;
  out.reserve(space.retained.size());
  for (const auto pair : space.retained) out.push_back({pair});
  for (const auto& [id, gold_vec] : gold) {
    const auto g = flatten(gold_vec);
    const auto p = flatten(predictions.at(id));
    for (auto& c : out) {
      const bool gb = g.get(c.pair);
      const bool pb = p.get(c.pair);
      if (gb && pb) ++c.tp;
      else if (!gb && pb) ++c.fp;
      else if (gb && !pb) ++c.fn;
      else ++c.tn;
    }
  }
  return out;
}

std::vector<LabelConfusion> merge_confusions(std::span<const LabelConfusion> a, std::span<const LabelConfusion> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::InvalidArgument, "cannot merge confusions over different pairs");
  std::vector<LabelConfusion> out(a.begin(), a.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i].pair != b[i].pair) {
      throw Error(ErrorCode::InvalidArgument, "cannot merge confusions over different pairs");
    }
    out[i].tp += b[i].tp;
    out[i].fp += b[i].fp;
    out[i].fn += b[i].fn;
    out[i].tn += b[i].tn;
  }
  return out;
}

double f_score(const LabelConfusion& c) noexcept {
  const auto denom = 2 * c.tp + c.fp + c.fn;
  return denom == 0 ? 0.0 : static_cast<double>(2 * c.tp) / static_cast<double>(denom);
}

std::string_view to_string(Partition partition) noexcept {
  switch (partition) {
    case Partition::Present: return "present";
    case Partition::Conflicted: return "conflicted";
    case Partition::All: return "all";
  }
  return "unknown";
}

namespace {

bool in_partition(LabelPair pair, Partition partition) {
  switch (partition) {
    case Partition::Present: return pair.polarity == Polarity::Present;
    case Partition::Conflicted: return pair.polarity == Polarity::Conflicted;
    case Partition::All: return true;
  }
  return false;
}

constexpr std::array<Partition, 3> kPartitions{Partition::Present, Partition::Conflicted, Partition::All};

}  // namespace

EvaluationReport aggregate(std::string system_id, std::span<const LabelConfusion> confusions,
                           const LabelSpace& space, std::span<const Partition> partitions) {
  EvaluationReport report;
  report.system_id = std::move(system_id);
  report.label_space = space;
  report.confusions.assign(confusions.begin(), confusions.end());
  report.n_videos = confusions.empty() ? 0 : confusions.front().total();
  for (const auto& c : confusions) report.per_label_f[c.pair] = f_score(c);

  for (const auto partition : partitions) {
    double sum_f = 0.0, weighted_sum = 0.0;
    std::size_t n = 0, support = 0;
    for (const auto& c : confusions) {
      if (!in_partition(c.pair, partition)) continue;
      const double f = f_score(c);
      sum_f += f;
      weighted_sum += f * static_cast<double>(c.support());
      support += c.support();
      ++n;
    }
    if (n == 0) {
      throw Error(ErrorCode::EmptyPartition,
                  "partition '" + std::string(to_string(partition)) + "' has no label pairs");
    }
    report.aggregates[partition] = {
        support == 0 ? 0.0 : weighted_sum / static_cast<double>(support),
        sum_f / static_cast<double>(n),
    };
  }
  return report;
}

EvaluationReport evaluate(std::string system_id, const GoldSet& predictions, const GoldSet& gold,
                          const LabelSpace& space) {
  const auto conf = confusions(predictions, gold, space);
  std::vector<Partition> wanted;
  for (const auto partition : kPartitions) {
    if (std::any_of(space.retained.begin(), space.retained.end(),
                    [&](LabelPair p) { return in_partition(p, partition); })) {
      wanted.push_back(partition);
    }
  }
  if (wanted.empty()) throw Error(ErrorCode::EmptyPartition, "label space is empty");
  auto report = aggregate(std::move(system_id), conf, space, wanted);
  report.n_videos = gold.size();
  return report;
}

std::string format_report_json(const EvaluationReport& report) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["system_id"] = report.system_id;
  doc["n_videos"] = report.n_videos;
  ordered_json space;
  space["min_count"] = report.label_space.min_count;
  space["retained"] = ordered_json::array();
  for (const auto p : report.label_space.retained) space["retained"].push_back(to_string(p));
  doc["label_space"] = space;
  doc["per_label"] = ordered_json::array();
  for (const auto& c : report.confusions) {
    doc["per_label"].push_back({{"label", to_string(c.pair)},
                                {"f", report.per_label_f.at(c.pair)},
                                {"support", c.support()},
                                {"tp", c.tp},
                                {"fp", c.fp},
                                {"fn", c.fn},
                                {"tn", c.tn}});
  }
  ordered_json aggs = ordered_json::object();
  for (const auto& [partition, scores] : report.aggregates) {
    aggs[std::string(to_string(partition))] = {{"weighted_f", scores.weighted_f}, {"macro_f", scores.macro_f}};
  }
  doc["aggregates"] = aggs;
  return doc.dump(2) + "\n";
}

ComparisonTable compare(std::span<const EvaluationReport> reports) {
  if (reports.empty()) throw Error(ErrorCode::EmptyInput, "nothing to compare");
  for (const auto& r : reports) {
    if (r.label_space.retained != reports.front().label_space.retained) {
      throw Error(ErrorCode::IncompatibleReports, "report '" + r.system_id + "' uses a different label space than '" +
                                                      reports.front().system_id + "'");
    }
  }
  ComparisonTable table;
  for (const auto& r : reports) table.systems.push_back(r.system_id);

  auto add_row = [&](std::string key, auto score_of) {
    ComparisonRow row{std::move(key), {}, 0};
    for (const auto& r : reports) row.scores.push_back(score_of(r));
    row.best = static_cast<std::size_t>(std::max_element(row.scores.begin(), row.scores.end()) - row.scores.begin());
    table.rows.push_back(std::move(row));
  };
  for (const auto pair : reports.front().label_space.retained) {
    add_row(to_string(pair), [pair](const EvaluationReport& r) { return r.per_label_f.at(pair); });
  }
  for (const auto partition : kPartitions) {
    const bool everywhere = std::all_of(reports.begin(), reports.end(),
                                        [&](const EvaluationReport& r) { return r.aggregates.contains(partition); });
    if (!everywhere) continue;
    add_row("weighted_f/" + std::string(to_string(partition)),
            [partition](const EvaluationReport& r) { return r.aggregates.at(partition).weighted_f; });
    add_row("macro_f/" + std::string(to_string(partition)),
            [partition](const EvaluationReport& r) { return r.aggregates.at(partition).macro_f; });
  }
  return table;
}

std::string format_comparison_csv(const ComparisonTable& table) {
  std::string out = "row";
  for (const auto& s : table.systems) out += "," + s;
  out += ",best\n";
  for (const auto& row : table.rows) {
    out += row.key;
    for (const double s : row.scores) out += fmt::format(",{:.6f}", s);
    out += "," + table.systems[row.best] + "\n";
  }
  return out;
}

RadarSeries radar_series(std::span<const EvaluationReport> reports, Polarity polarity) {
  RadarSeries radar;
  radar.polarity = polarity;
  for (const auto& def : value_catalog()) radar.axes.push_back(def.name);
  for (const auto& r : reports) {
    radar.systems.push_back(r.system_id);
    std::vector<double> row(kValueCount, 0.0);
    for (std::size_t v = 0; v < kValueCount; ++v) {
      const auto it = r.per_label_f.find(LabelPair{v, polarity});
      if (it != r.per_label_f.end()) row[v] = it->second;
    }
    radar.values.push_back(std::move(row));
  }
  return radar;
}

std::string format_radar_tsv(const RadarSeries& radar) {
  std::string out = "value";
  for (const auto& s : radar.systems) out += "\t" + s;
  out += "\n";
  for (std::size_t a = 0; a < radar.axes.size(); ++a) {
    out += radar.axes[a];
    for (const auto& series : radar.values) out += fmt::format("\t{:.6f}", series[a]);
    out += "\n";
  }
  return out;
}

}  // namespace valex
