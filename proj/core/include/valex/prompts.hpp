#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "valex/domain.hpp"

namespace valex {

enum class PromptTask : std::uint8_t { ScriptExtraction, ValueExtractionDirect, ValueExtractionScript };
std::string_view to_string(PromptTask task) noexcept;

struct Prompt {
  PromptTask task = PromptTask::ScriptExtraction;
  std::string text;
  std::vector<std::string> attachments;  // media locators

  friend bool operator==(const Prompt&, const Prompt&) = default;
};

/// Video-to-script prompt with the video attached. Throws Error(MissingMedia)
/// when the media path is empty or does not exist.
Prompt build_script_prompt(const VideoRecord& video);

/// Codebook prompt for direct extraction from a video (one attachment).
/// Throws Error(IncompleteCodebook) unless `codebook` holds all 19 values,
/// and Error(InvalidArgument) when mode is not ValueExtractionDirect.
Prompt build_value_prompt(PromptTask mode, std::span<const ValueDef> codebook, const VideoRecord& video);

/// Codebook prompt for few-shot extraction from a script (no attachments).
Prompt build_value_prompt(PromptTask mode, std::span<const ValueDef> codebook, const Script& script);

/// Text appended when an answer could not be parsed and the model is asked
/// again. `attempt` starts at 1.
std::string reprompt_suffix(std::size_t attempt);

}  // namespace valex
