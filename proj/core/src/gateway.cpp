#include "valex/gateway.hpp"

#include <cstdlib>
#include <fstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "text_util.hpp"
#include "valex/error.hpp"

namespace valex {

using nlohmann::json;

void BackendConfig::validate() const {
  if (max_concurrency < 1) throw Error(ErrorCode::Configuration, backend_id + ": max_concurrency must be >= 1");
  if (timeout.count() <= 0) throw Error(ErrorCode::Configuration, backend_id + ": timeout must be positive");
  if (initial_backoff.count() < 0) throw Error(ErrorCode::Configuration, backend_id + ": negative backoff");
}

MockBackend& MockBackend::add_rule(std::string needle, std::string response) {
  rules_.push_back({std::move(needle), std::move(response)});
  return *this;
}

MockBackend& MockBackend::fail_when_contains(std::string needle) {
  fail_needles_.push_back(std::move(needle));
  return *this;
}

MockBackend& MockBackend::fail_next(std::size_t n) {
  pending_failures_.store(n);
  return *this;
}

std::string MockBackend::complete(const BackendRequest& request) {
  calls_.fetch_add(1);
  auto matches = [&](const std::string& needle) {
    if (request.prompt_text.find(needle) != std::string_view::npos) return true;
    for (const auto& a : request.attachments) {
      if (a.locator.find(needle) != std::string::npos) return true;
    }
    return false;
  };
  std::size_t pending = pending_failures_.load();
  while (pending > 0) {
    if (pending_failures_.compare_exchange_weak(pending, pending - 1)) {
      throw std::runtime_error("mock backend: scripted failure");
    }
  }
  for (const auto& needle : fail_needles_) {
    if (matches(needle)) throw std::runtime_error("mock backend: request matched failure rule '" + needle + "'");
  }
  for (const auto& rule : rules_) {
    if (matches(rule.needle)) return rule.response;
  }
  return default_response_;
}

std::string prompt_fingerprint(const Prompt& prompt) {
  std::string material;
  material += to_string(prompt.task);
  material.push_back('\0');
  material += std::to_string(prompt.text.size());
  material.push_back('\0');
  material += prompt.text;
  for (const auto& locator : prompt.attachments) {
    std::string bytes;
    try {
      bytes = detail::read_file(locator);
    } catch (const Error&) {
      throw Error(ErrorCode::MissingMedia, "cannot read attachment " + locator);
    }
    material.push_back('\0');
    material += std::to_string(bytes.size());
    material.push_back('\0');
    material += bytes;
  }
  return detail::sha256_hex(material);
}

ResponseCache::ResponseCache(std::filesystem::path directory) : dir_(std::move(directory)) {
  std::filesystem::create_directories(*dir_);
}

std::optional<RawResponse> ResponseCache::get(const std::string& fingerprint) const {
  {
    std::shared_lock lock(mutex_);
    if (const auto it = memory_.find(fingerprint); it != memory_.end()) return it->second;
  }
  if (!dir_) return std::nullopt;
  const auto path = *dir_ / (fingerprint + ".json");
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return std::nullopt;
  try {
    const auto doc = json::parse(detail::read_file(path));
    RawResponse r;
    r.prompt_fingerprint = doc.at("fingerprint").get<std::string>();
    r.text = doc.at("text").get<std::string>();
    r.latency = std::chrono::milliseconds(doc.value("latency_ms", 0));
    r.backend_id = doc.value("backend_id", std::string{});
    if (r.prompt_fingerprint != fingerprint) return std::nullopt;
    std::unique_lock lock(mutex_);
    memory_.try_emplace(fingerprint, r);
    return r;
  } catch (const std::exception&) {
    return std::nullopt;  // unreadable entry counts as a miss and is rewritten
  }
}

void ResponseCache::put(const RawResponse& response) {
  RawResponse stored = response;
  stored.from_cache = false;
  stored.attempts = 0;
  {
    std::unique_lock lock(mutex_);
    memory_.insert_or_assign(response.prompt_fingerprint, stored);
  }
  if (!dir_) return;
  json doc = {{"fingerprint", stored.prompt_fingerprint},
              {"text", stored.text},
              {"latency_ms", stored.latency.count()},
              {"backend_id", stored.backend_id}};
  detail::write_file_atomic(*dir_ / (stored.prompt_fingerprint + ".json"), doc.dump(2) + "\n");
}

std::size_t ResponseCache::size() const {
  if (dir_) {
    std::size_t n = 0;
    for (const auto& entry : std::filesystem::directory_iterator(*dir_)) {
      if (entry.path().extension() == ".json") ++n;
    }
    return n;
  }
  std::shared_lock lock(mutex_);
  return memory_.size();
}

namespace {

std::string resolve_credential(const BackendConfig& cfg) {
  if (cfg.credential_env_var.empty()) return {};
  const char* value = std::getenv(cfg.credential_env_var.c_str());
  if (value == nullptr || *value == '\0') {
    throw Error(ErrorCode::Configuration,
                cfg.backend_id + ": credential variable " + cfg.credential_env_var + " is not set");
  }
  return value;
}

}  // namespace

RawResponse invoke(const Prompt& prompt, const BackendConfig& cfg, Backend& backend, ResponseCache* cache) {
  const auto credential = resolve_credential(cfg);
  const auto fingerprint = prompt_fingerprint(prompt);
  if (cache != nullptr) {
    if (auto hit = cache->get(fingerprint)) {
      hit->from_cache = true;
      hit->attempts = 0;
      return *hit;
    }
  }

  std::vector<Attachment> attachments;
  attachments.reserve(prompt.attachments.size());
  for (const auto& locator : prompt.attachments) attachments.push_back({locator, detail::read_file(locator)});
  const BackendRequest request{prompt.text, attachments, cfg.timeout, credential};

  std::string last_error;
  auto backoff = cfg.initial_backoff;
  for (std::size_t attempt = 1; attempt <= cfg.max_retries + 1; ++attempt) {
    const auto start = std::chrono::steady_clock::now();
    try {
      RawResponse r;
      r.text = backend.complete(request);
      r.latency = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
      r.prompt_fingerprint = fingerprint;
      r.backend_id = cfg.backend_id;
      r.attempts = attempt;
      if (cache != nullptr) cache->put(r);
      return r;
    } catch (const std::exception& e) {
      last_error = e.what();
    }
    if (attempt <= cfg.max_retries && backoff.count() > 0) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
  }
  throw Error(ErrorCode::BackendUnavailable, cfg.backend_id + ": gave up after " +
                                                 std::to_string(cfg.max_retries + 1) + " attempt(s): " + last_error);
}

std::vector<InvokeOutcome> invoke_all(std::span<const Prompt> prompts, const BackendConfig& cfg, Backend& backend,
                                      ResponseCache* cache) {
  cfg.validate();
  std::vector<InvokeOutcome> out(prompts.size(), std::string("not run"));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < prompts.size(); i = next.fetch_add(1)) {
      try {
        out[i] = invoke(prompts[i], cfg, backend, cache);
      } catch (const std::exception& e) {
        out[i] = std::string(e.what());
      }
    }
  };
  const auto n_workers = std::min(cfg.max_concurrency, prompts.size());
  if (n_workers <= 1) {
    worker();
    return out;
  }
  {
    std::vector<std::jthread> threads;
    threads.reserve(n_workers);
    for (std::size_t t = 0; t < n_workers; ++t) threads.emplace_back(worker);
  }
  return out;
}

AnnotationVector extract_values_llm(const ValueSubject& subject, PromptTask mode, const BackendConfig& cfg,
                                    Backend& backend, ResponseCache* cache, std::span<const ValueDef> codebook) {
  const bool subject_is_video = std::holds_alternative<VideoRecord>(subject);
  if (subject_is_video != (mode == PromptTask::ValueExtractionDirect)) {
    throw Error(ErrorCode::InvalidArgument, "extraction mode does not match the subject kind");
  }
  const Prompt base = subject_is_video ? build_value_prompt(mode, codebook, std::get<VideoRecord>(subject))
                                       : build_value_prompt(mode, codebook, std::get<Script>(subject));
  Prompt prompt = base;
  std::string last_text;
  std::string last_error;
  for (std::size_t attempt = 0; attempt <= cfg.max_retries; ++attempt) {
    if (attempt > 0) prompt.text = base.text + reprompt_suffix(attempt);
    const auto response = invoke(prompt, cfg, backend, cache);
    try {
      return parse_value_response(response);
    } catch (const ParseFailure& e) {
      last_text = response.text;
      last_error = e.what();
    }
  }
  throw ParseFailure(ErrorCode::ExtractionFailed,
                     "no readable answer after " + std::to_string(cfg.max_retries + 1) + " request(s): " + last_error,
                     last_text);
}

}  // namespace valex
