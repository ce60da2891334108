#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "valex/classifier.hpp"
#include "valex/corpus.hpp"
#include "valex/encoder.hpp"
#include "valex/gateway.hpp"

namespace valex {

enum class PipelineMode : std::uint8_t { DirectLlm, TwoStepLlm, TwoStepSupervised };
std::string_view to_string(PipelineMode mode) noexcept;
PipelineMode parse_pipeline_mode(std::string_view text);

/// Backend entry of a run config. "mock" backends are built from the
/// response/rules/fail_when_contains keys; "http" backends from the
/// BackendConfig endpoint.
struct BackendSpec {
  std::string type = "mock";
  BackendConfig config;
  std::string default_response;
  std::vector<MockBackend::Rule> rules;
  std::vector<std::string> fail_when_contains;
};

struct PipelineSpec {
  std::string id;
  PipelineMode mode = PipelineMode::TwoStepSupervised;
  std::string backend;                 // LLM modes
  std::filesystem::path model;         // supervised: pretrained model dir (optional)
  bool train = true;                   // supervised: train when no model is given
};

struct RunConfig {
  std::filesystem::path corpus;
  std::filesystem::path gold;
  std::filesystem::path output_dir;
  std::filesystem::path cache_dir;  // empty: <output_dir>/cache
  SplitRatios split_ratios;
  std::uint64_t split_seed = 13;
  StratifyKey stratify = StratifyKey::Influencer;
  std::map<std::string, BackendSpec> backends;
  std::string script_backend;
  std::vector<PipelineSpec> pipelines;
  TrainConfig train;
  std::size_t label_min_count = 30;
  BagOfTokensEncoder::Options encoder;
  std::optional<FineTuneOptions> domain_finetune;

  /// The parsed document after overrides, serialized with sorted keys.
  std::string canonical_json;

  /// Throws Error(Configuration).
  void validate() const;
};

/// Parses a run config document. Relative paths resolve against `base_dir`.
/// `overrides` are "dotted.key=value" pairs applied before parsing; values
/// that parse as JSON are used as such, anything else as a string.
/// Throws Error(Configuration).
RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir,
                           const std::vector<std::string>& overrides = {});
RunConfig load_run_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

/// Hex SHA-256 of the canonical config with output_dir removed, so identical
/// runs into different directories share a hash.
std::string config_hash(const RunConfig& config);

enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitPartial = 2 };

struct CommandResult {
  int exit_code = kExitOk;
  std::vector<std::string> diagnostics;
  std::vector<std::filesystem::path> outputs;  // relative to output_dir
  std::size_t backend_calls = 0;

  void fail(int code, std::string message);
};

/// Validates manifest and gold, writes reports/corpus-stats.json and the
/// count plots.
CommandResult cmd_ingest(const RunConfig& config);

/// Writes scripts/<video_id>.txt for every manifest video through the
/// script backend. Existing parseable scripts are kept without a backend
/// call; failures go to scripts/failures.json and exit 2.
CommandResult cmd_scripts(const RunConfig& config);

/// Runs one LLM pipeline over the test split into predictions/<id>.csv.
CommandResult cmd_extract_llm(const RunConfig& config, const std::string& pipeline_id);

/// Trains the supervised pipeline's model into models/<id>/.
CommandResult cmd_train(const RunConfig& config, const std::string& pipeline_id);

/// Predicts the test split with the supervised pipeline's model.
CommandResult cmd_predict(const RunConfig& config, const std::string& pipeline_id);

/// Scores every pipeline that has predictions, then writes per-system
/// reports, the comparison table, radar series and plots.
CommandResult cmd_evaluate(const RunConfig& config);

/// Every stage in order, then the run manifest. A failing pipeline is left
/// out of the comparison and the run exits 2 after finishing the others.
CommandResult cmd_run(const RunConfig& config);

struct AgreementOptions {
  std::filesystem::path annotations;  // two raters per video, optional resolver
  std::string resolver_id;            // rows of this annotator resolve disputes
  std::filesystem::path output_dir;
};

/// AC1, kappa and percent agreement between the two raters to
/// <output_dir>/agreement.json; with a resolver, also the consolidated gold
/// to <output_dir>/consolidated.csv.
CommandResult cmd_agreement(const AgreementOptions& options);

}  // namespace valex
