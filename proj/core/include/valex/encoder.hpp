#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "valex/domain.hpp"

namespace valex {

/// Text in, fixed-width vector out, plus a masked-token training mode for
/// domain adaptation. Implementations must be deterministic.
class TextEncoder {
 public:
  virtual ~TextEncoder() = default;

  virtual std::string id() const = 0;
  virtual std::size_t dimension() const = 0;
  /// Only the first `max_tokens` tokens are read.
  virtual std::vector<double> encode(std::string_view text, std::size_t max_tokens) const = 0;

  /// Mean cross-entropy of predicting masked tokens; mask positions are drawn
  /// from `seed`, so equal seeds score the same positions.
  virtual double masked_token_loss(std::span<const std::string> texts, std::uint64_t seed) const = 0;
  /// One gradient step of the masked-token objective over `texts`.
  /// Returns the batch loss measured before the update.
  virtual double masked_token_step(std::span<const std::string> texts, double learning_rate, std::uint64_t seed) = 0;

  virtual std::unique_ptr<TextEncoder> clone() const = 0;
  virtual void save(const std::filesystem::path& directory) const = 0;

  bool fine_tuned() const noexcept { return fine_tuned_; }
  void mark_fine_tuned() noexcept { fine_tuned_ = true; }

 protected:
  bool fine_tuned_ = false;
};

/// Lower-cased alphanumeric runs, truncated to max_tokens.
std::vector<std::string> tokenize(std::string_view text, std::size_t max_tokens);

/// Feature-hashed bag of tokens: the output is a presence indicator per hash
/// bucket followed by the mean of learned token embeddings. The embeddings
/// are what the masked-token objective trains (a CBOW-style predictor of the
/// masked token's bucket from its window).
class BagOfTokensEncoder final : public TextEncoder {
 public:
  struct Options {
    std::size_t buckets = 4096;
    std::size_t embedding_dim = 16;
    std::size_t context_window = 8;
    double mask_probability = 0.15;
    std::uint64_t seed = 7;
  };

  BagOfTokensEncoder() : BagOfTokensEncoder(Options{}) {}
  explicit BagOfTokensEncoder(Options options);

  std::string id() const override { return "bag-of-tokens"; }
  std::size_t dimension() const override { return options_.buckets + options_.embedding_dim; }
  std::vector<double> encode(std::string_view text, std::size_t max_tokens) const override;
  double masked_token_loss(std::span<const std::string> texts, std::uint64_t seed) const override;
  double masked_token_step(std::span<const std::string> texts, double learning_rate, std::uint64_t seed) override;
  std::unique_ptr<TextEncoder> clone() const override;
  void save(const std::filesystem::path& directory) const override;

  static std::unique_ptr<BagOfTokensEncoder> load(const std::filesystem::path& directory);

  const Options& options() const noexcept { return options_; }
  std::size_t bucket(std::string_view token) const noexcept;

 private:
  struct MaskedExample {
    std::size_t target;
    std::vector<std::size_t> context;
  };
  std::vector<MaskedExample> masked_examples(std::span<const std::string> texts, std::uint64_t seed) const;
  double example_loss(const MaskedExample& ex, std::vector<double>& hidden, std::vector<double>& probs) const;

  Options options_;
  std::vector<double> input_embeddings_;   // buckets x embedding_dim
  std::vector<double> output_embeddings_;  // buckets x embedding_dim
};

/// Reads the encoder saved in `directory`; throws Error(ModelLoad).
std::unique_ptr<TextEncoder> load_encoder(const std::filesystem::path& directory);

/// Text handed to encoders: headers then body, speaker tags kept.
std::string script_text(const Script& script);

struct FineTuneOptions {
  std::size_t steps = 10;
  std::size_t batch_size = 8;
  double learning_rate = 2.0;
  std::uint64_t seed = 17;
};

struct FineTuneResult {
  std::unique_ptr<TextEncoder> encoder;
  std::vector<double> step_losses;
};

/// Copies `encoder` and continues its masked-token training over the
/// serialized scripts. Throws Error(EmptyCorpus) when `scripts` is empty.
FineTuneResult domain_finetune(const TextEncoder& encoder, std::span<const Script> scripts,
                               const FineTuneOptions& options = {});

}  // namespace valex
