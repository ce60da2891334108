#include "valex/classifier.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstring>
#include <mutex>
#include <random>
#include <thread>

#include <fmt/format.h>
#include <json.hpp>

#include "text_util.hpp"
#include "valex/error.hpp"
#include "valex/evaluation.hpp"

namespace valex {

using nlohmann::json;

std::string_view to_string(EarlyStopMetric metric) noexcept {
  switch (metric) {
    case EarlyStopMetric::WeightedF: return "weighted_f";
    case EarlyStopMetric::MacroF: return "macro_f";
    case EarlyStopMetric::None: return "none";
  }
  return "unknown";
}

EarlyStopMetric parse_early_stop_metric(std::string_view text) {
  if (text == "weighted_f") return EarlyStopMetric::WeightedF;
  if (text == "macro_f") return EarlyStopMetric::MacroF;
  if (text == "none") return EarlyStopMetric::None;
  throw Error(ErrorCode::Configuration, "unknown early-stop metric '" + std::string(text) + "'");
}

void TrainConfig::validate() const {
  if (!(threshold > 0.0 && threshold < 1.0)) throw Error(ErrorCode::Configuration, "threshold must lie in (0,1)");
  if (epochs < 1) throw Error(ErrorCode::Configuration, "epochs must be >= 1");
  if (batch_size < 1) throw Error(ErrorCode::Configuration, "batch_size must be >= 1");
  if (max_sequence_length < 1) throw Error(ErrorCode::Configuration, "max_sequence_length must be >= 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw Error(ErrorCode::Configuration, "learning_rate must be positive");
  }
}

namespace {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

TrainedModel::TrainedModel(std::shared_ptr<const TextEncoder> encoder, LabelSpace space, TrainConfig config,
                           std::vector<double> weights, std::vector<double> bias)
    : encoder_(std::move(encoder)),
      space_(std::move(space)),
      config_(config),
      weights_(std::move(weights)),
      bias_(std::move(bias)) {
  if (!encoder_) throw Error(ErrorCode::InvalidArgument, "model needs an encoder");
  if (bias_.size() != space_.dimension() || weights_.size() != space_.dimension() * encoder_->dimension()) {
    throw Error(ErrorCode::InvalidArgument, "head weights do not match the label space and encoder");
  }
}

ModelHandle TrainedModel::handle() const {
  return {encoder_->id(), space_, space_.dimension(), encoder_->fine_tuned(), artifacts_path_};
}

std::vector<double> TrainedModel::probabilities_from_features(std::span<const double> x) const {
  const auto dim = encoder_->dimension();
  std::vector<double> out(space_.dimension());
  for (std::size_t j = 0; j < out.size(); ++j) {
    const double* w = weights_.data() + j * dim;
    double z = bias_[j];
    for (std::size_t k = 0; k < dim; ++k) {
      if (x[k] != 0.0) z += w[k] * x[k];
    }
    out[j] = sigmoid(z);
  }
  return out;
}

std::vector<double> TrainedModel::probabilities(const Script& script) const {
  return probabilities_from_features(encoder_->encode(script_text(script), config_.max_sequence_length));
}

AnnotationVector TrainedModel::predict(const Script& script, std::optional<double> threshold) const {
  return decide(space_, probabilities(script), threshold.value_or(config_.threshold));
}

AnnotationVector decide(const LabelSpace& space, std::span<const double> probabilities, double threshold) {
  if (probabilities.size() != space.dimension()) {
    throw Error(ErrorCode::InvalidArgument, "probability count does not match the label space");
  }
  std::array<double, kPairCount> fired;
  fired.fill(-1.0);
  for (std::size_t j = 0; j < probabilities.size(); ++j) {
    if (probabilities[j] >= threshold) fired[space.retained[j].flat_index()] = probabilities[j];
  }
  AnnotationVector out;
  for (std::size_t v = 0; v < kValueCount; ++v) {
    const double present = fired[2 * v];
    const double conflicted = fired[2 * v + 1];
    if (present < 0 && conflicted < 0) continue;
    out.set(v, present >= conflicted ? Label::Present : Label::Conflicted);
  }
  return out;
}

namespace {

struct Features {
  std::vector<std::vector<double>> rows;
  std::vector<std::vector<std::uint8_t>> targets;  // per row, per retained pair
};

Features build_features(std::span<const std::string> ids, const std::map<std::string, Script>& scripts,
                        const GoldSet& gold, const LabelSpace& space, const TextEncoder& encoder,
                        std::size_t max_tokens) {
  Features f;
  for (const auto& id : ids) {
    const auto bits = flatten(gold.at(id));
    f.rows.push_back(encoder.encode(script_text(scripts.at(id)), max_tokens));
    std::vector<std::uint8_t> t(space.dimension());
    for (std::size_t j = 0; j < t.size(); ++j) t[j] = bits.get(space.retained[j]) ? 1 : 0;
    f.targets.push_back(std::move(t));
  }
  return f;
}

void require_data(std::span<const std::string> ids, const std::map<std::string, Script>& scripts,
                  const GoldSet& gold, std::string_view part) {
  std::vector<std::string> missing;
  for (const auto& id : ids) {
    if (!scripts.contains(id)) missing.push_back(id + " (script)");
    if (!gold.contains(id)) missing.push_back(id + " (gold)");
  }
  if (!missing.empty()) {
    throw Error(ErrorCode::MissingData,
                fmt::format("{} split is missing data for: {}", part, fmt::join(missing, ", ")));
  }
}

}  // namespace

TrainedModel train(const CorpusSplit& split, const std::map<std::string, Script>& scripts, const GoldSet& gold,
                   const LabelSpace& space, const TrainConfig& config, const TextEncoder& encoder,
                   const std::filesystem::path& artifacts_path) {
  config.validate();
  if (split.train.empty()) throw Error(ErrorCode::MissingData, "training split is empty");
  if (space.dimension() == 0) throw Error(ErrorCode::EmptyLabelSpace, "label space retains no pairs");
  require_data(split.train, scripts, gold, "train");
  require_data(split.validation, scripts, gold, "validation");

  std::array<std::size_t, kPairCount> train_counts{};
  for (const auto& id : split.train) {
    const auto bits = flatten(gold.at(id));
    for (std::size_t i = 0; i < kPairCount; ++i) train_counts[i] += bits.bits().test(i) ? 1 : 0;
  }
  std::vector<std::string> unseen;
  for (const auto pair : space.retained) {
    if (train_counts[pair.flat_index()] == 0) unseen.push_back(to_string(pair));
  }
  if (!unseen.empty()) {
    throw Error(ErrorCode::InconsistentLabelSpace,
                fmt::format("label space retains pairs absent from the training data: {}", fmt::join(unseen, ", ")));
  }

  const auto train_data = build_features(split.train, scripts, gold, space, encoder, config.max_sequence_length);
  const auto val_data = build_features(split.validation, scripts, gold, space, encoder, config.max_sequence_length);

  const std::size_t dim = encoder.dimension();
  const std::size_t heads = space.dimension();
  std::vector<double> w(heads * dim, 0.0), b(heads, 0.0);
  std::vector<double> mw(w.size(), 0.0), vw(w.size(), 0.0), mb(heads, 0.0), vb(heads, 0.0);
  std::vector<double> gw(w.size()), gb(heads);
  constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  std::size_t adam_t = 0;

  std::shared_ptr<const TextEncoder> frozen = encoder.clone();
  TrainedModel model(frozen, space, config, w, b);

  GoldSet val_gold;
  for (const auto& id : split.validation) val_gold.emplace(id, gold.at(id));

  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> order(train_data.rows.size());
  double best_score = -1.0;
  std::size_t since_best = 0;
  std::vector<double> probs(heads);

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng() % i]);

    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const auto stop = std::min(order.size(), start + config.batch_size);
      std::fill(gw.begin(), gw.end(), 0.0);
      std::fill(gb.begin(), gb.end(), 0.0);
      for (std::size_t r = start; r < stop; ++r) {
        const auto& x = train_data.rows[order[r]];
        const auto& y = train_data.targets[order[r]];
        for (std::size_t j = 0; j < heads; ++j) {
          const double* wj = w.data() + j * dim;
          double z = b[j];
          for (std::size_t k = 0; k < dim; ++k) {
            if (x[k] != 0.0) z += wj[k] * x[k];
          }
          const double p = sigmoid(z);
          epoch_loss -= y[j] ? std::log(std::max(p, 1e-12)) : std::log(std::max(1.0 - p, 1e-12));
          const double err = p - static_cast<double>(y[j]);
          double* gj = gw.data() + j * dim;
          for (std::size_t k = 0; k < dim; ++k) {
            if (x[k] != 0.0) gj[k] += err * x[k];
          }
          gb[j] += err;
        }
      }
      const double inv = 1.0 / static_cast<double>(stop - start);
      ++adam_t;
      const double c1 = 1.0 - std::pow(beta1, static_cast<double>(adam_t));
      const double c2 = 1.0 - std::pow(beta2, static_cast<double>(adam_t));
      auto adam = [&](std::vector<double>& p, std::vector<double>& m, std::vector<double>& v,
                      const std::vector<double>& g) {
        for (std::size_t i = 0; i < p.size(); ++i) {
          const double gi = g[i] * inv;
          m[i] = beta1 * m[i] + (1 - beta1) * gi;
          v[i] = beta2 * v[i] + (1 - beta2) * gi * gi;
          p[i] -= config.learning_rate * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps);
        }
      };
      adam(w, mw, vw, gw);
      adam(b, mb, vb, gb);
    }

    EpochMetrics metrics;
    metrics.epoch = epoch;
    metrics.train_loss = epoch_loss / static_cast<double>(order.size() * heads);
    TrainedModel candidate(frozen, space, config, w, b);
    if (!val_data.rows.empty()) {
      GoldSet val_pred;
      for (std::size_t r = 0; r < val_data.rows.size(); ++r) {
        val_pred.emplace(split.validation[r],
                         decide(space, candidate.probabilities_from_features(val_data.rows[r]), config.threshold));
      }
      const auto report = evaluate("validation", val_pred, val_gold, space);
      metrics.validation_weighted_f = report.aggregates.at(Partition::All).weighted_f;
      metrics.validation_macro_f = report.aggregates.at(Partition::All).macro_f;
    }
    model.history_.push_back(metrics);

    const bool scored = config.early_stop_metric != EarlyStopMetric::None && !val_data.rows.empty();
    if (!scored) {
      model.weights_ = w;
      model.bias_ = b;
      model.best_epoch_ = epoch;
      continue;
    }
    const double score = config.early_stop_metric == EarlyStopMetric::WeightedF ? metrics.validation_weighted_f
                                                                                 : metrics.validation_macro_f;
    if (score > best_score) {
      best_score = score;
      since_best = 0;
      model.weights_ = w;
      model.bias_ = b;
      model.best_epoch_ = epoch;
    } else if (++since_best >= config.patience) {
      break;
    }
  }

  if (!artifacts_path.empty()) {
    model.artifacts_path_ = artifacts_path;
    model.save(artifacts_path);
  }
  return model;
}

namespace {

constexpr std::string_view kMetadataFile = "metadata.json";
constexpr std::string_view kHeadFile = "head.bin";
constexpr std::string_view kEncoderDir = "encoder";

json config_to_json(const TrainConfig& c) {
  return {{"max_sequence_length", c.max_sequence_length},
          {"batch_size", c.batch_size},
          {"learning_rate", c.learning_rate},
          {"epochs", c.epochs},
          {"early_stop_metric", std::string(to_string(c.early_stop_metric))},
          {"patience", c.patience},
          {"threshold", c.threshold},
          {"seed", c.seed}};
}

}  // namespace

void TrainedModel::save(const std::filesystem::path& directory) const {
  std::filesystem::create_directories(directory);
  encoder_->save(directory / kEncoderDir);

  nlohmann::ordered_json meta;
  meta["format_version"] = 1;
  meta["encoder_id"] = encoder_->id();
  meta["encoder_path"] = std::string(kEncoderDir);
  meta["fine_tuned"] = encoder_->fine_tuned();
  meta["feature_dimension"] = encoder_->dimension();
  meta["head_dimension"] = space_.dimension();
  meta["weights_file"] = std::string(kHeadFile);
  nlohmann::ordered_json ls;
  ls["min_count"] = space_.min_count;
  ls["retained"] = json::array();
  for (const auto p : space_.retained) ls["retained"].push_back(to_string(p));
  ls["counts_basis"] = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < kPairCount; ++i) {
    ls["counts_basis"][to_string(LabelPair::from_flat_index(i))] = space_.counts_basis[i];
  }
  meta["label_space"] = ls;
  meta["train_config"] = config_to_json(config_);
  meta["best_epoch"] = best_epoch_;
  meta["history"] = json::array();
  for (const auto& h : history_) {
    meta["history"].push_back({{"epoch", h.epoch},
                               {"train_loss", h.train_loss},
                               {"validation_weighted_f", h.validation_weighted_f},
                               {"validation_macro_f", h.validation_macro_f}});
  }
  detail::write_file_atomic(directory / kMetadataFile, meta.dump(2) + "\n");

  std::string blob(sizeof(double) * (weights_.size() + bias_.size()), '\0');
  std::memcpy(blob.data(), weights_.data(), sizeof(double) * weights_.size());
  std::memcpy(blob.data() + sizeof(double) * weights_.size(), bias_.data(), sizeof(double) * bias_.size());
  detail::write_file_atomic(directory / kHeadFile, blob);
}

TrainedModel TrainedModel::load(const std::filesystem::path& directory) {
  try {
    const auto meta = json::parse(detail::read_file(directory / kMetadataFile));
    std::shared_ptr<const TextEncoder> enc = load_encoder(directory / meta.at("encoder_path").get<std::string>());
    if (enc->id() != meta.at("encoder_id").get<std::string>()) {
      throw Error(ErrorCode::ModelLoad, "encoder id does not match metadata");
    }
    LabelSpace space;
    const auto& ls = meta.at("label_space");
    space.min_count = ls.at("min_count").get<std::size_t>();
    for (const auto& p : ls.at("retained")) space.retained.push_back(parse_label_pair(p.get<std::string>()));
    for (const auto& [key, count] : ls.at("counts_basis").items()) {
      space.counts_basis[parse_label_pair(key).flat_index()] = count.get<std::size_t>();
    }
    if (!std::is_sorted(space.retained.begin(), space.retained.end())) {
      throw Error(ErrorCode::ModelLoad, "retained pairs are not in label order");
    }
    const auto& c = meta.at("train_config");
    TrainConfig cfg;
    cfg.max_sequence_length = c.at("max_sequence_length").get<std::size_t>();
    cfg.batch_size = c.at("batch_size").get<std::size_t>();
    cfg.learning_rate = c.at("learning_rate").get<double>();
    cfg.epochs = c.at("epochs").get<std::size_t>();
    cfg.early_stop_metric = parse_early_stop_metric(c.at("early_stop_metric").get<std::string>());
    cfg.patience = c.at("patience").get<std::size_t>();
    cfg.threshold = c.at("threshold").get<double>();
    cfg.seed = c.at("seed").get<std::uint64_t>();

    const auto blob = detail::read_file(directory / meta.at("weights_file").get<std::string>());
    const auto nw = space.dimension() * enc->dimension();
    const auto nb = space.dimension();
    if (blob.size() != sizeof(double) * (nw + nb)) throw Error(ErrorCode::ModelLoad, "head weights have the wrong size");
    std::vector<double> w(nw), b(nb);
    std::memcpy(w.data(), blob.data(), sizeof(double) * nw);
    std::memcpy(b.data(), blob.data() + sizeof(double) * nw, sizeof(double) * nb);

    TrainedModel model(std::move(enc), std::move(space), cfg, std::move(w), std::move(b));
    model.best_epoch_ = meta.value("best_epoch", std::size_t{0});
    for (const auto& h : meta.value("history", json::array())) {
      model.history_.push_back({h.at("epoch").get<std::size_t>(), h.at("train_loss").get<double>(),
                                h.at("validation_weighted_f").get<double>(), h.at("validation_macro_f").get<double>()});
    }
    model.artifacts_path_ = directory;
    return model;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ModelLoad) throw;
    throw Error(ErrorCode::ModelLoad, "cannot load model from " + directory.string() + ": " + e.what());
  } catch (const std::exception& e) {
    throw Error(ErrorCode::ModelLoad, "cannot load model from " + directory.string() + ": " + e.what());
  }
}

GoldSet predict_all(const TrainedModel& model, const std::map<std::string, Script>& scripts,
                    std::optional<double> threshold, std::size_t workers) {
  std::vector<const std::pair<const std::string, Script>*> items;
  items.reserve(scripts.size());
  for (const auto& entry : scripts) items.push_back(&entry);
  std::vector<AnnotationVector> results(items.size());

  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, std::max<std::size_t>(1, items.size()));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < workers; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < items.size(); i = next++) {
          try {
            results[i] = model.predict(items[i]->second, threshold);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);

  GoldSet out;
  for (std::size_t i = 0; i < items.size(); ++i) out.emplace(items[i]->first, std::move(results[i]));
  return out;
}

}  // namespace valex
