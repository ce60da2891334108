#include "valex/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <set>
#include <thread>

#include <fmt/format.h>
#include <json.hpp>

#include "text_util.hpp"
#include "valex/agreement.hpp"
#include "valex/error.hpp"
#include "valex/evaluation.hpp"
#include "valex/plots.hpp"

namespace valex {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(PipelineMode mode) noexcept {
  switch (mode) {
    case PipelineMode::DirectLlm: return "direct_llm";
    case PipelineMode::TwoStepLlm: return "two_step_llm";
    case PipelineMode::TwoStepSupervised: return "two_step_supervised";
  }
  return "unknown";
}

PipelineMode parse_pipeline_mode(std::string_view text) {
  if (text == "direct_llm") return PipelineMode::DirectLlm;
  if (text == "two_step_llm") return PipelineMode::TwoStepLlm;
  if (text == "two_step_supervised") return PipelineMode::TwoStepSupervised;
  throw Error(ErrorCode::Configuration, "unknown pipeline mode '" + std::string(text) + "'");
}

void CommandResult::fail(int code, std::string message) {
  exit_code = std::max(exit_code, code);
  diagnostics.push_back(std::move(message));
}

// ---------------------------------------------------------------------------
// Config

namespace {

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorCode::Configuration, msg); }

void check_keys(const json& obj, std::string_view where, std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) config_error(std::string(where) + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      config_error(fmt::format("unknown key '{}' in {}", key, where));
    }
  }
}

template <class T>
T get_or(const json& obj, const char* key, T fallback, std::string_view where) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    config_error(fmt::format("{}.{}: {}", where, key, e.what()));
  }
}

fs::path resolve(const fs::path& base, const std::string& p) {
  if (p.empty()) return {};
  const fs::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) config_error("override '" + assignment + "' is not key=value");
  const auto key = assignment.substr(0, eq);
  const auto raw = assignment.substr(eq + 1);
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const auto part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) config_error("override key '" + key + "' has an empty segment");
    if (node->is_array()) {
      std::size_t idx = 0;
      try {
        idx = std::stoul(part);
      } catch (const std::exception&) {
        config_error("override key '" + key + "' indexes an array with '" + part + "'");
      }
      if (idx >= node->size()) config_error("override key '" + key + "' is out of range");
      node = &(*node)[idx];
    } else {
      if (!node->is_object()) *node = json::object();
      node = &(*node)[part];
    }
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  *node = std::move(value);
}

bool safe_id(std::string_view id) {
  return !id.empty() && id != "." && id != ".." && std::all_of(id.begin(), id.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
  });
}

}  // namespace

void RunConfig::validate() const {
  if (corpus.empty()) config_error("corpus path is required");
  if (gold.empty()) config_error("gold path is required");
  if (output_dir.empty()) config_error("output_dir is required");
  if (label_min_count < 1) config_error("label_min_count must be >= 1");
  train.validate();
  std::set<std::string> seen;
  bool needs_scripts = false;
  for (const auto& p : pipelines) {
    if (!safe_id(p.id)) config_error("pipeline id '" + p.id + "' must be non-empty [A-Za-z0-9._-]");
    if (!seen.insert(p.id).second) config_error("duplicate pipeline id '" + p.id + "'");
    if (p.mode != PipelineMode::DirectLlm) needs_scripts = true;
    if (p.mode != PipelineMode::TwoStepSupervised && !backends.contains(p.backend)) {
      config_error("pipeline '" + p.id + "' names unknown backend '" + p.backend + "'");
    }
  }
  if (needs_scripts && !backends.contains(script_backend)) {
    config_error("two-step pipelines need a script_backend naming a configured backend");
  }
  for (const auto& [name, spec] : backends) {
    if (spec.type != "mock" && spec.type != "http") config_error("backend '" + name + "' has unknown type '" + spec.type + "'");
    if (spec.type == "http" && spec.config.endpoint.empty()) config_error("http backend '" + name + "' needs an endpoint");
    spec.config.validate();
  }
}

RunConfig parse_run_config(std::string_view text, const fs::path& base_dir, const std::vector<std::string>& overrides) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) config_error("run config is not a JSON object");
  for (const auto& o : overrides) apply_override(doc, o);

  check_keys(doc, "config",
             {"corpus", "gold", "output_dir", "cache_dir", "split", "backends", "script_backend", "pipelines", "train",
              "label_min_count", "encoder", "domain_finetune"});
  RunConfig cfg;
  cfg.corpus = resolve(base_dir, get_or<std::string>(doc, "corpus", "", "config"));
  cfg.gold = resolve(base_dir, get_or<std::string>(doc, "gold", "", "config"));
  cfg.output_dir = resolve(base_dir, get_or<std::string>(doc, "output_dir", "", "config"));
  cfg.cache_dir = resolve(base_dir, get_or<std::string>(doc, "cache_dir", "", "config"));
  cfg.script_backend = get_or<std::string>(doc, "script_backend", "", "config");
  cfg.label_min_count = get_or<std::size_t>(doc, "label_min_count", cfg.label_min_count, "config");

  if (doc.contains("split")) {
    const auto& s = doc["split"];
    check_keys(s, "split", {"train", "validation", "test", "seed", "stratify"});
    cfg.split_ratios.train = get_or<double>(s, "train", cfg.split_ratios.train, "split");
    cfg.split_ratios.validation = get_or<double>(s, "validation", cfg.split_ratios.validation, "split");
    cfg.split_ratios.test = get_or<double>(s, "test", cfg.split_ratios.test, "split");
    cfg.split_seed = get_or<std::uint64_t>(s, "seed", cfg.split_seed, "split");
    try {
      cfg.stratify = parse_stratify_key(get_or<std::string>(s, "stratify", "influencer", "split"));
    } catch (const Error& e) {
      config_error(e.what());
    }
  }

  if (doc.contains("backends")) {
    if (!doc["backends"].is_object()) config_error("backends must be an object");
    for (const auto& [name, b] : doc["backends"].items()) {
      const auto where = "backends." + name;
      check_keys(b, where,
                 {"type", "endpoint", "credential_env", "max_concurrency", "timeout_ms", "max_retries",
                  "initial_backoff_ms", "response", "rules", "fail_when_contains"});
      BackendSpec spec;
      spec.type = get_or<std::string>(b, "type", "mock", where);
      spec.config.backend_id = name;
      spec.config.endpoint = get_or<std::string>(b, "endpoint", "", where);
      spec.config.credential_env_var = get_or<std::string>(b, "credential_env", "", where);
      spec.config.max_concurrency = get_or<std::size_t>(b, "max_concurrency", spec.config.max_concurrency, where);
      spec.config.timeout = std::chrono::milliseconds(get_or<std::int64_t>(b, "timeout_ms", spec.config.timeout.count(), where));
      spec.config.max_retries = get_or<std::size_t>(b, "max_retries", spec.config.max_retries, where);
      spec.config.initial_backoff =
          std::chrono::milliseconds(get_or<std::int64_t>(b, "initial_backoff_ms", spec.config.initial_backoff.count(), where));
      spec.default_response = get_or<std::string>(b, "response", "", where);
      if (b.contains("rules")) {
        if (!b["rules"].is_array()) config_error(where + ".rules must be an array");
        for (const auto& r : b["rules"]) {
          check_keys(r, where + ".rules[]", {"needle", "response"});
          spec.rules.push_back({get_or<std::string>(r, "needle", "", where), get_or<std::string>(r, "response", "", where)});
        }
      }
      spec.fail_when_contains = get_or<std::vector<std::string>>(b, "fail_when_contains", {}, where);
      cfg.backends.emplace(name, std::move(spec));
    }
  }

  if (doc.contains("pipelines")) {
    if (!doc["pipelines"].is_array()) config_error("pipelines must be an array");
    for (const auto& p : doc["pipelines"]) {
      check_keys(p, "pipelines[]", {"id", "mode", "backend", "model", "train"});
      PipelineSpec spec;
      spec.id = get_or<std::string>(p, "id", "", "pipelines[]");
      spec.mode = parse_pipeline_mode(get_or<std::string>(p, "mode", "", "pipelines[]"));
      spec.backend = get_or<std::string>(p, "backend", "", "pipelines[]");
      spec.model = resolve(base_dir, get_or<std::string>(p, "model", "", "pipelines[]"));
      spec.train = get_or<bool>(p, "train", true, "pipelines[]");
      cfg.pipelines.push_back(std::move(spec));
    }
  }

  if (doc.contains("train")) {
    const auto& t = doc["train"];
    check_keys(t, "train",
               {"max_sequence_length", "batch_size", "learning_rate", "epochs", "early_stop_metric", "patience",
                "threshold", "seed"});
    auto& c = cfg.train;
    c.max_sequence_length = get_or<std::size_t>(t, "max_sequence_length", c.max_sequence_length, "train");
    c.batch_size = get_or<std::size_t>(t, "batch_size", c.batch_size, "train");
    c.learning_rate = get_or<double>(t, "learning_rate", c.learning_rate, "train");
    c.epochs = get_or<std::size_t>(t, "epochs", c.epochs, "train");
    c.early_stop_metric = parse_early_stop_metric(get_or<std::string>(t, "early_stop_metric", "weighted_f", "train"));
    c.patience = get_or<std::size_t>(t, "patience", c.patience, "train");
    c.threshold = get_or<double>(t, "threshold", c.threshold, "train");
    c.seed = get_or<std::uint64_t>(t, "seed", c.seed, "train");
  }

  if (doc.contains("encoder")) {
    const auto& e = doc["encoder"];
    check_keys(e, "encoder", {"buckets", "embedding_dim", "context_window", "mask_probability", "seed"});
    auto& o = cfg.encoder;
    o.buckets = get_or<std::size_t>(e, "buckets", o.buckets, "encoder");
    o.embedding_dim = get_or<std::size_t>(e, "embedding_dim", o.embedding_dim, "encoder");
    o.context_window = get_or<std::size_t>(e, "context_window", o.context_window, "encoder");
    o.mask_probability = get_or<double>(e, "mask_probability", o.mask_probability, "encoder");
    o.seed = get_or<std::uint64_t>(e, "seed", o.seed, "encoder");
  }

  if (doc.contains("domain_finetune") && !doc["domain_finetune"].is_null()) {
    const auto& d = doc["domain_finetune"];
    check_keys(d, "domain_finetune", {"steps", "batch_size", "learning_rate", "seed"});
    FineTuneOptions o;
    o.steps = get_or<std::size_t>(d, "steps", o.steps, "domain_finetune");
    o.batch_size = get_or<std::size_t>(d, "batch_size", o.batch_size, "domain_finetune");
    o.learning_rate = get_or<double>(d, "learning_rate", o.learning_rate, "domain_finetune");
    o.seed = get_or<std::uint64_t>(d, "seed", o.seed, "domain_finetune");
    cfg.domain_finetune = o;
  }

  cfg.canonical_json = doc.dump();
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const fs::path& path, const std::vector<std::string>& overrides) {
  std::string text;
  try {
    text = detail::read_file(path);
  } catch (const Error& e) {
    config_error(e.what());
  }
  return parse_run_config(text, fs::absolute(path).parent_path(), overrides);
}

std::string config_hash(const RunConfig& config) {
  json doc = json::parse(config.canonical_json);
  doc.erase("output_dir");
  return detail::sha256_hex(doc.dump());
}

// ---------------------------------------------------------------------------
// Shared stage helpers

namespace {

struct Layout {
  fs::path root;
  fs::path scripts() const { return root / "scripts"; }
  fs::path models() const { return root / "models"; }
  fs::path reports() const { return root / "reports"; }
  fs::path plots() const { return root / "plots"; }
  fs::path predictions() const { return root / "predictions"; }
  fs::path script_file(const std::string& id) const { return scripts() / (id + ".txt"); }
  fs::path prediction_file(const std::string& id) const { return predictions() / (id + ".csv"); }
  fs::path failure_file(const std::string& id) const { return predictions() / (id + ".failures.json"); }
  fs::path model_dir(const std::string& id) const { return models() / id; }
};

Layout layout_of(const RunConfig& config) { return {config.output_dir}; }

fs::path cache_dir_of(const RunConfig& config) {
  return config.cache_dir.empty() ? config.output_dir / "cache" : config.cache_dir;
}

void write_output(CommandResult& result, const Layout& layout, const fs::path& path, std::string_view contents) {
  detail::write_file_atomic(path, contents);
  result.outputs.push_back(path.lexically_relative(layout.root));
}

/// Manifest with media paths made absolute against the manifest's directory.
CorpusManifest load_corpus(const RunConfig& config) {
  auto manifest = load_manifest(config.corpus);
  const auto base = fs::absolute(config.corpus).parent_path();
  for (auto& r : manifest.records) {
    if (!r.media_path.empty() && fs::path(r.media_path).is_relative()) {
      r.media_path = (base / r.media_path).lexically_normal().string();
    }
  }
  return manifest;
}

CorpusSplit split_of(const RunConfig& config, const CorpusManifest& manifest) {
  return split_corpus(manifest, config.split_ratios, config.stratify, config.split_seed);
}

GoldSet restrict(const GoldSet& gold, const std::vector<std::string>& ids) {
  GoldSet out;
  for (const auto& id : ids) {
    if (const auto it = gold.find(id); it != gold.end()) out.emplace(id, it->second);
  }
  return out;
}

std::unique_ptr<Backend> make_backend(const BackendSpec& spec) {
  if (spec.type == "http") return make_http_backend(spec.config);
  auto mock = std::make_unique<MockBackend>(spec.default_response);
  for (const auto& r : spec.rules) mock->add_rule(r.needle, r.response);
  for (const auto& n : spec.fail_when_contains) mock->fail_when_contains(n);
  return mock;
}

const PipelineSpec& find_pipeline(const RunConfig& config, const std::string& id) {
  for (const auto& p : config.pipelines) {
    if (p.id == id) return p;
  }
  throw Error(ErrorCode::Configuration, "no pipeline named '" + id + "'");
}

/// Reads scripts/<id>.txt for each id; unreadable or unparseable files are
/// reported in `missing`.
std::map<std::string, Script> load_scripts(const Layout& layout, const std::vector<std::string>& ids,
                                           std::vector<std::string>* missing) {
  std::map<std::string, Script> out;
  for (const auto& id : ids) {
    const auto path = layout.script_file(id);
    std::error_code ec;
    if (!fs::is_regular_file(path, ec)) {
      if (missing) missing->push_back(id);
      continue;
    }
    try {
      out.emplace(id, parse_script(detail::read_file(path), id));
    } catch (const Error&) {
      if (missing) missing->push_back(id);
    }
  }
  return out;
}

template <class F>
void parallel_for(std::size_t n, std::size_t workers, F&& body) {
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (std::size_t t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) body(i);
    });
  }
}

std::string failures_json(const std::vector<std::pair<std::string, std::string>>& failures) {
  ordered_json arr = ordered_json::array();
  for (const auto& [id, msg] : failures) arr.push_back({{"video_id", id}, {"error", msg}});
  return arr.dump(2) + "\n";
}

LabelSpace evaluation_space(const RunConfig& config, const GoldSet& gold, const CorpusSplit& split) {
  return select_labels(restrict(gold, split.train), config.label_min_count);
}

}  // namespace

// ---------------------------------------------------------------------------
// Commands

CommandResult cmd_ingest(const RunConfig& config) {
  CommandResult result;
  const auto layout = layout_of(config);
  std::optional<CorpusManifest> manifest;
  std::optional<GoldSet> gold;
  try {
    manifest = load_corpus(config);
  } catch (const Error& e) {
    result.fail(kExitValidation, std::string("corpus: ") + e.what());
  }
  try {
    gold = read_gold(config.gold);
  } catch (const Error& e) {
    result.fail(kExitValidation, std::string("gold: ") + e.what());
  }
  if (!manifest || !gold) return result;

  CorpusStats stats;
  try {
    stats = corpus_stats(*manifest, *gold);
  } catch (const Error& e) {
    result.fail(kExitValidation, e.what());
    return result;
  }

  ordered_json doc;
  doc["n_videos"] = stats.n_videos;
  doc["n_labels"] = stats.n_labels;
  doc["per_value"] = ordered_json::array();
  std::string tsv = "value\tpresent\tconflicted\n";
  for (std::size_t v = 0; v < kValueCount; ++v) {
    const auto present = stats.count({v, Polarity::Present});
    const auto conflicted = stats.count({v, Polarity::Conflicted});
    doc["per_value"].push_back(
        {{"value", value_catalog()[v].name}, {"present", present}, {"conflicted", conflicted}, {"total", present + conflicted}});
    tsv += fmt::format("{}\t{}\t{}\n", value_catalog()[v].name, present, conflicted);
  }
  doc["labels_per_video"] = ordered_json::object();
  std::string hist_tsv = "labels\tvideos\n";
  for (const auto& [k, n] : stats.labels_per_video_histogram) {
    doc["labels_per_video"][std::to_string(k)] = n;
    hist_tsv += fmt::format("{}\t{}\n", k, n);
  }
  write_output(result, layout, layout.reports() / "corpus-stats.json", doc.dump(2) + "\n");
  write_output(result, layout, layout.reports() / "value-counts.tsv", tsv);
  write_output(result, layout, layout.reports() / "labels-per-video.tsv", hist_tsv);
  write_output(result, layout, layout.plots() / "value-counts.svg", render_value_counts_svg(stats));
  write_output(result, layout, layout.plots() / "labels-per-video.svg", render_label_histogram_svg(stats));
  result.diagnostics.push_back(fmt::format("{} videos, {} labels", stats.n_videos, stats.n_labels));
  return result;
}

CommandResult cmd_scripts(const RunConfig& config) {
  CommandResult result;
  const auto layout = layout_of(config);
  const auto it = config.backends.find(config.script_backend);
  if (it == config.backends.end()) {
    result.fail(kExitValidation, "no script_backend configured");
    return result;
  }
  CorpusManifest manifest;
  try {
    manifest = load_corpus(config);
  } catch (const Error& e) {
    result.fail(kExitValidation, std::string("corpus: ") + e.what());
    return result;
  }

  std::vector<const VideoRecord*> pending;
  std::vector<Prompt> prompts;
  std::vector<std::pair<std::string, std::string>> failures;
  for (const auto& rec : manifest.records) {
    std::vector<std::string> missing;
    load_scripts(layout, {rec.video_id}, &missing);
    if (missing.empty()) continue;  // already extracted and valid
    try {
      prompts.push_back(build_script_prompt(rec));
      pending.push_back(&rec);
    } catch (const Error& e) {
      failures.emplace_back(rec.video_id, e.what());
    }
  }

  if (!prompts.empty()) {
    auto backend = make_backend(it->second);
    ResponseCache cache(cache_dir_of(config));
    const auto outcomes = invoke_all(prompts, it->second.config, *backend, &cache);
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
      const auto& id = pending[i]->video_id;
      if (const auto* err = std::get_if<std::string>(&outcomes[i])) {
        failures.emplace_back(id, *err);
        continue;
      }
      const auto& raw = std::get<RawResponse>(outcomes[i]);
      result.backend_calls += raw.attempts;
      try {
        const auto script = parse_script(raw, id);
        write_output(result, layout, layout.script_file(id), serialize_script(script));
      } catch (const Error& e) {
        failures.emplace_back(id, e.what());
      }
    }
  }

  std::sort(failures.begin(), failures.end());
  write_output(result, layout, layout.scripts() / "failures.json", failures_json(failures));
  for (const auto& [id, msg] : failures) result.fail(kExitPartial, "script " + id + ": " + msg);
  result.diagnostics.push_back(fmt::format("{} scripts extracted, {} failed, {} backend calls",
                                           prompts.size() - std::min(prompts.size(), failures.size()),
                                           failures.size(), result.backend_calls));
  return result;
}

CommandResult cmd_extract_llm(const RunConfig& config, const std::string& pipeline_id) {
  CommandResult result;
  const auto layout = layout_of(config);
  const auto& spec = find_pipeline(config, pipeline_id);
  if (spec.mode == PipelineMode::TwoStepSupervised) {
    result.fail(kExitValidation, "pipeline '" + pipeline_id + "' is supervised; use train/predict");
    return result;
  }
  const auto& bspec = config.backends.at(spec.backend);
  CorpusManifest manifest;
  CorpusSplit split;
  try {
    manifest = load_corpus(config);
    split = split_of(config, manifest);
  } catch (const Error& e) {
    result.fail(kExitValidation, e.what());
    return result;
  }

  const auto& ids = split.test;
  std::map<std::string, Script> scripts;
  if (spec.mode == PipelineMode::TwoStepLlm) scripts = load_scripts(layout, ids, nullptr);

  std::vector<std::optional<AnnotationVector>> labels(ids.size());
  std::vector<std::string> errors(ids.size());
  auto backend = make_backend(bspec);
  ResponseCache cache(cache_dir_of(config));
  parallel_for(ids.size(), bspec.config.max_concurrency, [&](std::size_t i) {
    try {
      if (spec.mode == PipelineMode::DirectLlm) {
        labels[i] = extract_values_llm(*manifest.find(ids[i]), PromptTask::ValueExtractionDirect, bspec.config,
                                       *backend, &cache);
      } else {
        const auto s = scripts.find(ids[i]);
        if (s == scripts.end()) throw Error(ErrorCode::MissingData, "no valid script for video " + ids[i]);
        labels[i] = extract_values_llm(s->second, PromptTask::ValueExtractionScript, bspec.config, *backend, &cache);
      }
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });

  GoldSet predictions;
  std::vector<std::pair<std::string, std::string>> failures;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (labels[i]) predictions.emplace(ids[i], *labels[i]);
    else failures.emplace_back(ids[i], errors[i]);
  }
  write_output(result, layout, layout.prediction_file(pipeline_id), format_annotations(predictions, pipeline_id));
  write_output(result, layout, layout.failure_file(pipeline_id), failures_json(failures));
  for (const auto& [id, msg] : failures) result.fail(kExitPartial, pipeline_id + " " + id + ": " + msg);
  return result;
}

CommandResult cmd_train(const RunConfig& config, const std::string& pipeline_id) {
  CommandResult result;
  const auto layout = layout_of(config);
  const auto& spec = find_pipeline(config, pipeline_id);
  if (spec.mode != PipelineMode::TwoStepSupervised) {
    result.fail(kExitValidation, "pipeline '" + pipeline_id + "' is not supervised");
    return result;
  }
  try {
    const auto manifest = load_corpus(config);
    const auto gold = read_gold(config.gold);
    const auto split = split_of(config, manifest);
    std::vector<std::string> fit_ids = split.train;
    fit_ids.insert(fit_ids.end(), split.validation.begin(), split.validation.end());
    std::vector<std::string> missing;
    const auto scripts = load_scripts(layout, fit_ids, &missing);
    if (!missing.empty()) {
      throw Error(ErrorCode::Precondition,
                  fmt::format("pipeline '{}' has no training data: scripts missing for {}", pipeline_id,
                              fmt::join(missing, ", ")));
    }
    const auto space = select_labels(restrict(gold, split.train), config.label_min_count);

    std::unique_ptr<TextEncoder> encoder = std::make_unique<BagOfTokensEncoder>(config.encoder);
    if (config.domain_finetune) {
      std::vector<Script> corpus;
      for (const auto& id : split.train) corpus.push_back(scripts.at(id));
      auto tuned = domain_finetune(*encoder, corpus, *config.domain_finetune);
      encoder = std::move(tuned.encoder);
    }
    const auto dir = layout.model_dir(pipeline_id);
    const auto model = train(split, scripts, gold, space, config.train, *encoder, dir);
    for (const auto* name : {"metadata.json", "head.bin", "encoder/encoder.json", "encoder/encoder.bin"}) {
      result.outputs.push_back((dir / name).lexically_relative(layout.root));
    }
    const auto& best = model.history().at(model.best_epoch() - 1);
    result.diagnostics.push_back(fmt::format("{}: {} labels, best epoch {}, validation weighted-F {:.4f}", pipeline_id,
                                             space.dimension(), model.best_epoch(), best.validation_weighted_f));
  } catch (const Error& e) {
    result.fail(kExitValidation, e.what());
  }
  return result;
}

CommandResult cmd_predict(const RunConfig& config, const std::string& pipeline_id) {
  CommandResult result;
  const auto layout = layout_of(config);
  const auto& spec = find_pipeline(config, pipeline_id);
  if (spec.mode != PipelineMode::TwoStepSupervised) {
    result.fail(kExitValidation, "pipeline '" + pipeline_id + "' is not supervised");
    return result;
  }
  try {
    const auto manifest = load_corpus(config);
    const auto split = split_of(config, manifest);
    const auto dir = spec.model.empty() ? layout.model_dir(pipeline_id) : spec.model;
    const auto model = TrainedModel::load(dir);
    std::vector<std::string> missing;
    const auto scripts = load_scripts(layout, split.test, &missing);
    const auto predictions = predict_all(model, scripts);
    std::vector<std::pair<std::string, std::string>> failures;
    for (const auto& id : missing) failures.emplace_back(id, "no valid script");
    write_output(result, layout, layout.prediction_file(pipeline_id), format_annotations(predictions, pipeline_id));
    write_output(result, layout, layout.failure_file(pipeline_id), failures_json(failures));
    for (const auto& [id, msg] : failures) result.fail(kExitPartial, pipeline_id + " " + id + ": " + msg);
  } catch (const Error& e) {
    result.fail(kExitValidation, e.what());
  }
  return result;
}

namespace {

CommandResult evaluate_pipelines(const RunConfig& config, const std::vector<std::string>& pipeline_ids) {
  CommandResult result;
  if (config.pipelines.empty()) return result;  // ingest-only config
  const auto layout = layout_of(config);
  GoldSet gold;
  CorpusSplit split;
  LabelSpace space;
  try {
    const auto manifest = load_corpus(config);
    gold = read_gold(config.gold);
    split = split_of(config, manifest);
    space = evaluation_space(config, gold, split);
  } catch (const Error& e) {
    result.fail(kExitValidation, e.what());
    return result;
  }
  const auto test_gold = restrict(gold, split.test);

  std::vector<EvaluationReport> reports;
  for (const auto& id : pipeline_ids) {
    try {
      const auto predictions = read_gold(layout.prediction_file(id));
      auto report = evaluate(id, predictions, test_gold, space);
      write_output(result, layout, layout.reports() / (id + ".json"), format_report_json(report));
      reports.push_back(std::move(report));
    } catch (const Error& e) {
      result.fail(kExitPartial, "evaluate " + id + ": " + e.what());
    }
  }
  if (reports.empty()) {
    result.fail(kExitPartial, "no pipeline produced a report");
    return result;
  }

  const auto table = compare(reports);
  write_output(result, layout, layout.reports() / "comparison.csv", format_comparison_csv(table));

  std::vector<std::string> categories;
  std::vector<BarSeries> bars;
  for (const auto& row : table.rows) {
    if (row.key.find('/') == std::string::npos) categories.push_back(row.key);
  }
  for (std::size_t s = 0; s < table.systems.size(); ++s) {
    BarSeries series{table.systems[s], {}};
    for (std::size_t r = 0; r < categories.size(); ++r) series.values.push_back(table.rows[r].scores[s]);
    bars.push_back(std::move(series));
  }
  write_output(result, layout, layout.plots() / "f-scores.svg", render_bar_svg("F-score per label", categories, bars));

  for (const auto polarity : {Polarity::Present, Polarity::Conflicted}) {
    const std::string suffix = polarity == Polarity::Present ? "present" : "conflicted";
    const auto radar = radar_series(reports, polarity);
    write_output(result, layout, layout.reports() / ("radar-" + suffix + ".tsv"), format_radar_tsv(radar));
    write_output(result, layout, layout.plots() / ("radar-" + suffix + ".svg"), render_radar_svg(radar));
  }
  return result;
}

void absorb(CommandResult& into, CommandResult&& from) {
  into.exit_code = std::max(into.exit_code, from.exit_code);
  for (auto& d : from.diagnostics) into.diagnostics.push_back(std::move(d));
  for (auto& o : from.outputs) into.outputs.push_back(std::move(o));
  into.backend_calls += from.backend_calls;
}

}  // namespace

CommandResult cmd_evaluate(const RunConfig& config) {
  const auto layout = layout_of(config);
  std::vector<std::string> ids;
  for (const auto& p : config.pipelines) {
    std::error_code ec;
    if (fs::is_regular_file(layout.prediction_file(p.id), ec)) ids.push_back(p.id);
  }
  return evaluate_pipelines(config, ids);
}

CommandResult cmd_run(const RunConfig& config) {
  CommandResult result;
  const auto layout = layout_of(config);

  auto ingest = cmd_ingest(config);
  const bool ingest_ok = ingest.exit_code == kExitOk;
  absorb(result, std::move(ingest));
  if (!ingest_ok) return result;

  const bool needs_scripts = std::any_of(config.pipelines.begin(), config.pipelines.end(),
                                         [](const PipelineSpec& p) { return p.mode != PipelineMode::DirectLlm; });
  if (needs_scripts) absorb(result, cmd_scripts(config));

  struct Status {
    const PipelineSpec* spec;
    bool ok = false;
    std::string error;
  };
  std::vector<Status> statuses;
  std::vector<std::string> succeeded;
  for (const auto& p : config.pipelines) {
    Status status{&p, false, {}};
    std::error_code ec;
    fs::remove(layout.prediction_file(p.id), ec);
    CommandResult stage;
    if (p.mode == PipelineMode::TwoStepSupervised) {
      if (p.model.empty() && !p.train) {
        stage.fail(kExitValidation, "pipeline '" + p.id + "' has no trained model and training is disabled");
      } else if (p.model.empty()) {
        stage = cmd_train(config, p.id);
      }
      if (stage.exit_code == kExitOk) absorb(stage, cmd_predict(config, p.id));
    } else {
      stage = cmd_extract_llm(config, p.id);
    }
    status.ok = stage.exit_code == kExitOk;
    if (!status.ok) {
      status.error = stage.diagnostics.empty() ? "failed" : stage.diagnostics.front();
      stage.exit_code = kExitPartial;
    } else {
      succeeded.push_back(p.id);
    }
    absorb(result, std::move(stage));
    statuses.push_back(std::move(status));
  }

  if (!succeeded.empty()) absorb(result, evaluate_pipelines(config, succeeded));

  ordered_json manifest;
  manifest["config_hash"] = config_hash(config);
  manifest["split_seed"] = config.split_seed;
  manifest["train_seed"] = config.train.seed;
  manifest["encoder_seed"] = config.encoder.seed;
  manifest["pipelines"] = ordered_json::array();
  for (const auto& s : statuses) {
    ordered_json entry;
    entry["id"] = s.spec->id;
    entry["mode"] = std::string(to_string(s.spec->mode));
    entry["status"] = s.ok ? "ok" : "failed";
    if (s.ok) {
      entry["predictions"] = layout.prediction_file(s.spec->id).lexically_relative(layout.root).generic_string();
      entry["report"] = (fs::path("reports") / (s.spec->id + ".json")).generic_string();
      if (s.spec->mode == PipelineMode::TwoStepSupervised && s.spec->model.empty()) {
        entry["model"] = (fs::path("models") / s.spec->id).generic_string();
      }
    } else {
      entry["error"] = s.error;
    }
    manifest["pipelines"].push_back(entry);
  }
  std::set<std::string> artifacts;
  for (const auto& o : result.outputs) artifacts.insert(o.generic_string());
  manifest["artifacts"] = artifacts;
  manifest["exit_code"] = result.exit_code;
  write_output(result, layout, layout.root / "run-manifest.json", manifest.dump(2) + "\n");
  return result;
}

CommandResult cmd_agreement(const AgreementOptions& options) {
  CommandResult result;
  const Layout layout{options.output_dir};
  try {
    const auto rows = read_annotation_rows(options.annotations);
    const auto pairs = pairs_from_rows(rows, options.resolver_id);
    const auto items = agreement_items(pairs);
    const std::vector<AgreementResult> results{gwet_ac1(items), cohen_kappa(items), percent_agreement(items)};
    write_output(result, layout, options.output_dir / "agreement.json", format_agreement_report(results));
    result.diagnostics.push_back(fmt::format("{} videos, {} items, AC1 {:.4f}, kappa {:.4f}, agreement {:.4f}",
                                             pairs.size(), items.size(), results[0].coefficient,
                                             results[1].coefficient, results[2].coefficient));
    if (!options.resolver_id.empty()) {
      const auto resolutions = resolutions_from_rows(rows, options.resolver_id);
      GoldSet consolidated;
      for (const auto& pair : pairs) {
        const auto it = resolutions.find(pair.video_id);
        consolidated.emplace(pair.video_id, consolidate(pair, it == resolutions.end() ? Resolution{} : it->second));
      }
      write_output(result, layout, options.output_dir / "consolidated.csv",
                   format_annotations(consolidated, options.resolver_id));
    }
  } catch (const Error& e) {
    result.fail(kExitValidation, e.what());
  }
  return result;
}

}  // namespace valex
