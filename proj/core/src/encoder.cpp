#include "valex/encoder.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>

#include <json.hpp>

#include "text_util.hpp"
#include "valex/error.hpp"

namespace valex {

using nlohmann::json;

std::vector<std::string> tokenize(std::string_view text, std::size_t max_tokens) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
      if (tokens.size() >= max_tokens) return tokens;
    }
  }
  if (!current.empty() && tokens.size() < max_tokens) tokens.push_back(std::move(current));
  return tokens;
}

std::string script_text(const Script& script) { return serialize_script(script); }

BagOfTokensEncoder::BagOfTokensEncoder(Options options) : options_(options) {
  if (options_.buckets < 2 || options_.embedding_dim < 1) {
    throw Error(ErrorCode::InvalidArgument, "bag-of-tokens encoder needs >= 2 buckets and >= 1 embedding dim");
  }
  const auto n = options_.buckets * options_.embedding_dim;
  input_embeddings_.resize(n);
  output_embeddings_.resize(n);
  std::mt19937_64 rng(options_.seed);
  // Uniform draws keep initialization identical across standard libraries.
  auto draw = [&rng] { return (static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5) * 0.2; };
  for (auto& w : input_embeddings_) w = draw();
  for (auto& w : output_embeddings_) w = draw();
}

std::size_t BagOfTokensEncoder::bucket(std::string_view token) const noexcept {
  return static_cast<std::size_t>(detail::fnv1a64(token) % options_.buckets);
}

std::vector<double> BagOfTokensEncoder::encode(std::string_view text, std::size_t max_tokens) const {
  const auto d = options_.embedding_dim;
  std::vector<double> out(dimension(), 0.0);
  const auto tokens = tokenize(text, max_tokens);
  if (tokens.empty()) return out;
  double* mean = out.data() + options_.buckets;
  for (const auto& tok : tokens) {
    const auto b = bucket(tok);
    out[b] = 1.0;
    const double* row = input_embeddings_.data() + b * d;
    for (std::size_t k = 0; k < d; ++k) mean[k] += row[k];
  }
  const double inv = 1.0 / static_cast<double>(tokens.size());
  for (std::size_t k = 0; k < d; ++k) mean[k] *= inv;
  return out;
}

std::vector<BagOfTokensEncoder::MaskedExample> BagOfTokensEncoder::masked_examples(
    std::span<const std::string> texts, std::uint64_t seed) const {
  std::vector<MaskedExample> out;
  std::mt19937_64 rng(seed);
  const auto threshold = static_cast<std::uint64_t>(options_.mask_probability * 18446744073709551615.0);
  const auto w = options_.context_window;
  for (const auto& text : texts) {
    const auto tokens = tokenize(text, std::numeric_limits<std::size_t>::max());
    if (tokens.size() < 2) continue;
    std::vector<std::size_t> ids(tokens.size());
    std::transform(tokens.begin(), tokens.end(), ids.begin(), [this](const std::string& t) { return bucket(t); });
    std::vector<std::size_t> masked;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (rng() < threshold) masked.push_back(i);
    }
    if (masked.empty()) masked.push_back(static_cast<std::size_t>(rng() % ids.size()));
    for (const auto i : masked) {
      MaskedExample ex{ids[i], {}};
      const auto lo = i >= w ? i - w : 0;
      const auto hi = std::min(ids.size(), i + w + 1);
      for (std::size_t j = lo; j < hi; ++j) {
        if (j != i) ex.context.push_back(ids[j]);
      }
      out.push_back(std::move(ex));
    }
  }
  return out;
}

double BagOfTokensEncoder::example_loss(const MaskedExample& ex, std::vector<double>& hidden,
                                        std::vector<double>& probs) const {
  const auto d = options_.embedding_dim;
  const auto v = options_.buckets;
  hidden.assign(d, 0.0);
  for (const auto c : ex.context) {
    const double* row = input_embeddings_.data() + c * d;
    for (std::size_t k = 0; k < d; ++k) hidden[k] += row[k];
  }
  const double inv = 1.0 / static_cast<double>(ex.context.size());
  for (auto& h : hidden) h *= inv;

  probs.resize(v);
  double max_logit = -1e300;
  for (std::size_t j = 0; j < v; ++j) {
    const double* row = output_embeddings_.data() + j * d;
    double z = 0.0;
    for (std::size_t k = 0; k < d; ++k) z += row[k] * hidden[k];
    probs[j] = z;
    max_logit = std::max(max_logit, z);
  }
  double total = 0.0;
  for (auto& p : probs) {
    p = std::exp(p - max_logit);
    total += p;
  }
  for (auto& p : probs) p /= total;
  return -std::log(std::max(probs[ex.target], 1e-300));
}

double BagOfTokensEncoder::masked_token_loss(std::span<const std::string> texts, std::uint64_t seed) const {
  const auto examples = masked_examples(texts, seed);
  if (examples.empty()) return 0.0;
  std::vector<double> hidden, probs;
  double total = 0.0;
  for (const auto& ex : examples) total += example_loss(ex, hidden, probs);
  return total / static_cast<double>(examples.size());
}

double BagOfTokensEncoder::masked_token_step(std::span<const std::string> texts, double learning_rate,
                                             std::uint64_t seed) {
  const auto examples = masked_examples(texts, seed);
  if (examples.empty()) return 0.0;
  const auto d = options_.embedding_dim;
  const auto v = options_.buckets;
  std::vector<double> grad_in(input_embeddings_.size(), 0.0);
  std::vector<double> grad_out(output_embeddings_.size(), 0.0);
  std::vector<double> hidden, probs, grad_hidden(d);
  double total = 0.0;
  for (const auto& ex : examples) {
    total += example_loss(ex, hidden, probs);
    probs[ex.target] -= 1.0;  // d loss / d logits
    std::fill(grad_hidden.begin(), grad_hidden.end(), 0.0);
    for (std::size_t j = 0; j < v; ++j) {
      const double g = probs[j];
      double* gout = grad_out.data() + j * d;
      const double* out_row = output_embeddings_.data() + j * d;
      for (std::size_t k = 0; k < d; ++k) {
        gout[k] += g * hidden[k];
        grad_hidden[k] += g * out_row[k];
      }
    }
    const double inv = 1.0 / static_cast<double>(ex.context.size());
    for (const auto c : ex.context) {
      double* gin = grad_in.data() + c * d;
      for (std::size_t k = 0; k < d; ++k) gin[k] += grad_hidden[k] * inv;
    }
  }
  const double scale = learning_rate / static_cast<double>(examples.size());
  for (std::size_t i = 0; i < input_embeddings_.size(); ++i) input_embeddings_[i] -= scale * grad_in[i];
  for (std::size_t i = 0; i < output_embeddings_.size(); ++i) output_embeddings_[i] -= scale * grad_out[i];
  return total / static_cast<double>(examples.size());
}

std::unique_ptr<TextEncoder> BagOfTokensEncoder::clone() const {
  return std::make_unique<BagOfTokensEncoder>(*this);
}

namespace {

constexpr std::string_view kMetaFile = "encoder.json";
constexpr std::string_view kWeightsFile = "encoder.bin";

}  // namespace

void BagOfTokensEncoder::save(const std::filesystem::path& directory) const {
  std::filesystem::create_directories(directory);
  const json meta = {{"encoder_id", id()},
                     {"format_version", 1},
                     {"buckets", options_.buckets},
                     {"embedding_dim", options_.embedding_dim},
                     {"context_window", options_.context_window},
                     {"mask_probability", options_.mask_probability},
                     {"seed", options_.seed},
                     {"fine_tuned", fine_tuned_},
                     {"weights_file", std::string(kWeightsFile)}};
  detail::write_file_atomic(directory / kMetaFile, meta.dump(2) + "\n");
  std::string blob(sizeof(double) * (input_embeddings_.size() + output_embeddings_.size()), '\0');
  std::memcpy(blob.data(), input_embeddings_.data(), sizeof(double) * input_embeddings_.size());
  std::memcpy(blob.data() + sizeof(double) * input_embeddings_.size(), output_embeddings_.data(),
              sizeof(double) * output_embeddings_.size());
  detail::write_file_atomic(directory / kWeightsFile, blob);
}

std::unique_ptr<BagOfTokensEncoder> BagOfTokensEncoder::load(const std::filesystem::path& directory) {
  json meta;
  std::string blob;
  try {
    meta = json::parse(detail::read_file(directory / kMetaFile));
    blob = detail::read_file(directory / kWeightsFile);
  } catch (const std::exception& e) {
    throw Error(ErrorCode::ModelLoad, "cannot read encoder in " + directory.string() + ": " + e.what());
  }
  if (meta.value("encoder_id", std::string{}) != "bag-of-tokens") {
    throw Error(ErrorCode::ModelLoad, "encoder in " + directory.string() + " is not a bag-of-tokens encoder");
  }
  Options opts;
  try {
    opts.buckets = meta.at("buckets").get<std::size_t>();
    opts.embedding_dim = meta.at("embedding_dim").get<std::size_t>();
    opts.context_window = meta.at("context_window").get<std::size_t>();
    opts.mask_probability = meta.at("mask_probability").get<double>();
    opts.seed = meta.at("seed").get<std::uint64_t>();
  } catch (const std::exception& e) {
    throw Error(ErrorCode::ModelLoad, std::string("bad encoder metadata: ") + e.what());
  }
  auto enc = std::make_unique<BagOfTokensEncoder>(opts);
  const auto n = enc->input_embeddings_.size();
  if (blob.size() != 2 * n * sizeof(double)) {
    throw Error(ErrorCode::ModelLoad, "encoder weights in " + directory.string() + " have the wrong size");
  }
  std::memcpy(enc->input_embeddings_.data(), blob.data(), n * sizeof(double));
  std::memcpy(enc->output_embeddings_.data(), blob.data() + n * sizeof(double), n * sizeof(double));
  if (meta.value("fine_tuned", false)) enc->mark_fine_tuned();
  return enc;
}

std::unique_ptr<TextEncoder> load_encoder(const std::filesystem::path& directory) {
  return BagOfTokensEncoder::load(directory);
}

FineTuneResult domain_finetune(const TextEncoder& encoder, std::span<const Script> scripts,
                               const FineTuneOptions& options) {
  if (scripts.empty()) throw Error(ErrorCode::EmptyCorpus, "domain fine-tuning needs at least one script");
  FineTuneResult result{encoder.clone(), {}};
  std::vector<std::string> texts;
  texts.reserve(scripts.size());
  for (const auto& s : scripts) texts.push_back(script_text(s));

  std::mt19937_64 rng(options.seed);
  const auto batch = std::max<std::size_t>(1, std::min(options.batch_size, texts.size()));
  std::vector<std::size_t> order(texts.size());
  std::size_t cursor = order.size();
  std::vector<std::string> mini;
  for (std::size_t step = 0; step < options.steps; ++step) {
    mini.clear();
    while (mini.size() < batch) {
      if (cursor == order.size()) {
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
        cursor = 0;
      }
      mini.push_back(texts[order[cursor++]]);
    }
    result.step_losses.push_back(result.encoder->masked_token_step(mini, options.learning_rate, rng()));
  }
  result.encoder->mark_fine_tuned();
  return result;
}

}  // namespace valex
