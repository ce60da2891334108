#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "valex/annotation_io.hpp"
#include "valex/corpus.hpp"
#include "valex/encoder.hpp"
#include "valex/label_space.hpp"

namespace valex {

enum class EarlyStopMetric : std::uint8_t { WeightedF, MacroF, None };
std::string_view to_string(EarlyStopMetric metric) noexcept;
EarlyStopMetric parse_early_stop_metric(std::string_view text);

struct TrainConfig {
  std::size_t max_sequence_length = 512;
  std::size_t batch_size = 16;
  double learning_rate = 0.05;
  std::size_t epochs = 30;
  EarlyStopMetric early_stop_metric = EarlyStopMetric::WeightedF;
  std::size_t patience = 3;
  double threshold = 0.5;
  std::uint64_t seed = 42;

  /// Throws Error(Configuration).
  void validate() const;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

struct EpochMetrics {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double validation_weighted_f = 0.0;
  double validation_macro_f = 0.0;
};

struct ModelHandle {
  std::string encoder_id;
  LabelSpace label_space;
  std::size_t head_dimension = 0;
  bool fine_tuned = false;
  std::filesystem::path artifacts_path;
};

/// Frozen encoder plus a linear sigmoid head, one output per retained pair.
/// Read-only after construction, so concurrent predict() calls are safe.
class TrainedModel {
 public:
  TrainedModel(std::shared_ptr<const TextEncoder> encoder, LabelSpace space, TrainConfig config,
               std::vector<double> weights, std::vector<double> bias);

  ModelHandle handle() const;
  const LabelSpace& label_space() const noexcept { return space_; }
  const TrainConfig& config() const noexcept { return config_; }
  const TextEncoder& encoder() const noexcept { return *encoder_; }
  const std::vector<EpochMetrics>& history() const noexcept { return history_; }
  std::size_t best_epoch() const noexcept { return best_epoch_; }

  /// One sigmoid output per retained pair, in label-space order.
  std::vector<double> probabilities(const Script& script) const;
  std::vector<double> probabilities_from_features(std::span<const double> features) const;
  /// Uses config().threshold when `threshold` is unset.
  AnnotationVector predict(const Script& script, std::optional<double> threshold = std::nullopt) const;

  /// Writes metadata.json, head.bin and encoder/ under `directory`.
  void save(const std::filesystem::path& directory) const;
  /// Throws Error(ModelLoad).
  static TrainedModel load(const std::filesystem::path& directory);

 private:
  friend TrainedModel train(const CorpusSplit&, const std::map<std::string, Script>&, const GoldSet&,
                            const LabelSpace&, const TrainConfig&, const TextEncoder&,
                            const std::filesystem::path&);

  std::shared_ptr<const TextEncoder> encoder_;
  LabelSpace space_;
  TrainConfig config_;
  std::vector<double> weights_;  // head_dimension x feature dimension, row-major
  std::vector<double> bias_;
  std::vector<EpochMetrics> history_;
  std::size_t best_epoch_ = 0;
  std::filesystem::path artifacts_path_;
};

/// Thresholds `probabilities` (label-space order) into a vector. When both
/// polarities of a value fire, the higher probability wins; on an exact tie
/// the present polarity wins.
AnnotationVector decide(const LabelSpace& space, std::span<const double> probabilities, double threshold);

/// Trains the head on split.train with binary cross-entropy and Adam, scoring
/// split.validation after every epoch and keeping the best epoch's weights.
/// Saves artifacts to `artifacts_path` unless it is empty.
/// Throws Error(MissingData) when a train/validation id lacks a script or gold
/// vector, Error(InconsistentLabelSpace) when a retained pair never occurs in
/// the training gold.
TrainedModel train(const CorpusSplit& split, const std::map<std::string, Script>& scripts, const GoldSet& gold,
                   const LabelSpace& space, const TrainConfig& config, const TextEncoder& encoder,
                   const std::filesystem::path& artifacts_path = {});

/// Predicts every script, spreading the work over `workers` threads
/// (0 = hardware concurrency).
GoldSet predict_all(const TrainedModel& model, const std::map<std::string, Script>& scripts,
                    std::optional<double> threshold = std::nullopt, std::size_t workers = 0);

}  // namespace valex
