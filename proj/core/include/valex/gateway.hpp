#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "valex/domain.hpp"
#include "valex/parsers.hpp"
#include "valex/prompts.hpp"

namespace valex {

struct BackendConfig {
  std::string backend_id = "mock";
  std::string endpoint;
  /// Name of the environment variable holding the credential; empty means
  /// the backend needs none.
  std::string credential_env_var;
  std::size_t max_concurrency = 4;
  std::chrono::milliseconds timeout{60'000};
  std::size_t max_retries = 2;
  /// Delay before the first retry; doubles on each further retry.
  std::chrono::milliseconds initial_backoff{500};

  /// Throws Error(Configuration) when an invariant does not hold.
  void validate() const;
};

struct RawResponse {
  std::string prompt_fingerprint;
  std::string text;
  std::chrono::milliseconds latency{0};
  std::string backend_id;
  std::size_t attempts = 0;  // backend calls made; 0 when served from cache
  bool from_cache = false;
};

/// One binary attachment as sent over the wire.
struct Attachment {
  std::string locator;
  std::string bytes;
};

struct BackendRequest {
  std::string_view prompt_text;
  std::span<const Attachment> attachments;
  std::chrono::milliseconds timeout{0};
  std::string credential;
};

/// Request/response model interface. complete() throws on failure; the
/// gateway retries any exception.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string complete(const BackendRequest& request) = 0;
};

/// Deterministic test backend. Responses are picked by the first rule whose
/// needle occurs in the prompt text or in an attachment locator; otherwise
/// the default response is returned.
class MockBackend final : public Backend {
 public:
  struct Rule {
    std::string needle;
    std::string response;
  };

  explicit MockBackend(std::string default_response = {}) : default_response_(std::move(default_response)) {}

  MockBackend& add_rule(std::string needle, std::string response);
  /// Requests whose prompt or attachments contain `needle` always fail.
  MockBackend& fail_when_contains(std::string needle);
  /// The next `n` calls fail regardless of content.
  MockBackend& fail_next(std::size_t n);

  std::string complete(const BackendRequest& request) override;

  std::size_t calls() const noexcept { return calls_.load(); }

 private:
  std::string default_response_;
  std::vector<Rule> rules_;
  std::vector<std::string> fail_needles_;
  std::atomic<std::size_t> pending_failures_{0};
  std::atomic<std::size_t> calls_{0};
};

/// Adapts a callable, mostly for tests.
class FunctionBackend final : public Backend {
 public:
  explicit FunctionBackend(std::function<std::string(const BackendRequest&)> fn) : fn_(std::move(fn)) {}
  std::string complete(const BackendRequest& request) override { return fn_(request); }

 private:
  std::function<std::string(const BackendRequest&)> fn_;
};

/// HTTP backend: POSTs a multipart form to cfg.endpoint ("http://host:port/path")
/// with a "prompt" text field and one "attachment" file part per attachment,
/// plus "Authorization: Bearer <credential>" when a credential is set. The
/// response body is the model text; non-2xx statuses throw.
std::unique_ptr<Backend> make_http_backend(const BackendConfig& cfg);

/// Content hash over task, prompt text and attachment bytes. Throws
/// Error(MissingMedia) when an attachment cannot be read.
std::string prompt_fingerprint(const Prompt& prompt);

/// Fingerprint-keyed response store. With a directory, entries persist as
/// <dir>/<fingerprint>.json; without, it is an in-memory map. Reads are
/// concurrent, writes atomic.
class ResponseCache {
 public:
  ResponseCache() = default;
  explicit ResponseCache(std::filesystem::path directory);

  std::optional<RawResponse> get(const std::string& fingerprint) const;
  void put(const RawResponse& response);
  std::size_t size() const;
  const std::optional<std::filesystem::path>& directory() const noexcept { return dir_; }

 private:
  std::optional<std::filesystem::path> dir_;
  mutable std::shared_mutex mutex_;
  mutable std::unordered_map<std::string, RawResponse> memory_;
};

/// Serves from cache on a fingerprint hit; otherwise calls the backend with
/// the configured timeout, retrying up to cfg.max_retries times with
/// exponential backoff, and caches the result. The credential variable is
/// checked before anything else (Error(Configuration)); exhausted retries give
/// Error(BackendUnavailable).
RawResponse invoke(const Prompt& prompt, const BackendConfig& cfg, Backend& backend, ResponseCache* cache);

/// Result slot for invoke_all(): a response or the error message.
using InvokeOutcome = std::variant<RawResponse, std::string>;

/// Runs invoke() over many prompts with at most cfg.max_concurrency in flight.
/// Output order matches input order.
std::vector<InvokeOutcome> invoke_all(std::span<const Prompt> prompts, const BackendConfig& cfg, Backend& backend,
                                      ResponseCache* cache);

inline Script parse_script(const RawResponse& response, std::string video_id = {}) {
  return parse_script(response.text, std::move(video_id));
}
inline AnnotationVector parse_value_response(const RawResponse& response) {
  return parse_value_response(response.text);
}

using ValueSubject = std::variant<VideoRecord, Script>;

/// build_value_prompt -> invoke -> parse_value_response. An unreadable answer
/// is re-requested (with a format reminder) up to cfg.max_retries times, then
/// raises ParseFailure(ExtractionFailed) holding the last raw answer.
AnnotationVector extract_values_llm(const ValueSubject& subject, PromptTask mode, const BackendConfig& cfg,
                                    Backend& backend, ResponseCache* cache,
                                    std::span<const ValueDef> codebook = value_catalog());

}  // namespace valex
