#include "valex/prompts.hpp"

#include <filesystem>
#include <set>

#include "valex/error.hpp"

namespace valex {

std::string_view to_string(PromptTask task) noexcept {
  switch (task) {
    case PromptTask::ScriptExtraction: return "script_extraction";
    case PromptTask::ValueExtractionDirect: return "value_extraction_direct";
    case PromptTask::ValueExtractionScript: return "value_extraction_script";
  }
  return "unknown";
}

namespace {

void require_media(const VideoRecord& video) {
  if (video.media_path.empty()) {
    throw Error(ErrorCode::MissingMedia, "video " + video.video_id + " has no media path");
  }
  std::error_code ec;
  if (!std::filesystem::is_regular_file(video.media_path, ec)) {
    throw Error(ErrorCode::MissingMedia, "video " + video.video_id + ": media not found at " + video.media_path);
  }
}

void require_full_codebook(std::span<const ValueDef> codebook) {
  std::set<std::string> names;
  for (const auto& def : codebook) {
    if (value_index(def.name)) names.insert(normalize_value_name(def.name));
  }
  if (names.size() != kValueCount || codebook.size() != kValueCount) {
    throw Error(ErrorCode::IncompleteCodebook, "codebook covers " + std::to_string(names.size()) + " of " +
                                                   std::to_string(kValueCount) + " values");
  }
}

constexpr std::string_view kScriptPrompt =
    "You are given a TikTok video. Convert the video into a detailed textual movie script, "
    "as a screenwriter would, including the master scene heading, action, dialogue and director's notes.\n"
    "\n"
    "Start the script with exactly these two header lines:\n"
    "Genre: <the genre of the video, for example Sports/Challenge>\n"
    "Sound: <Yes if the video includes verbal sound such as talking, narration or song; otherwise No>\n"
    "\n"
    "Then write the body of the script, one element per line, in the order the elements occur:\n"
    "- Dialogue, narration and lyrics as SPEAKER: \"spoken words\", with the speaker's name in capital letters.\n"
    "- On-screen text and captions inside square brackets, for example [SERVE 1].\n"
    "- Action lines describing who is shown, where they are, and what they do.\n"
    "\n"
    "Describe every visual and audio detail that matters for understanding the video, including gestures, "
    "facial expressions, sound effects and music. Do not add commentary outside the script.\n";

std::string theory_block(std::string_view medium) {
  std::string out;
  out += "Your task is to identify the personal values expressed in the ";
  out += medium;
  out += ", according to the Schwartz Theory of Personal Values.\n\n";
  out +=
      "The Schwartz Theory of Personal Values defines values as abstract goals that describe the end states "
      "people aspire to achieve in their lives. The theory identifies 19 values, each characterized by the "
      "goal it promotes. Values are expressed through judgments, evaluations, and behaviors.\n\n";
  out += "For each value, decide whether the ";
  out += medium;
  out +=
      " expresses or pursues it (present), contradicts or hinders its pursuit (conflicted), or does not refer "
      "to it at all (absent).\n\n";
  return out;
}

std::string codebook_block(std::span<const ValueDef> codebook, std::string_view medium) {
  std::string out = "The values are:\n\n";
  std::size_t n = 0;
  for (const auto& def : codebook) {
    out += std::to_string(++n) + ". " + def.name + ": " + def.definition + ".\n";
    for (const auto& ex : def.positive_examples) {
      out += "   Example of a " + std::string(medium) + " where " + def.name + " is present: " + ex + "\n";
    }
    for (const auto& ex : def.conflicted_examples) {
      out += "   Example of a " + std::string(medium) + " where " + def.name + " is conflicted: " + ex + "\n";
    }
    out += "\n";
  }
  return out;
}

std::string guidelines_block(std::string_view medium, std::string_view evidence) {
  std::string out = "Additional guidelines:\n";
  out += "- A " + std::string(medium) + " may refer to as many or as few values as are relevant, including none.\n";
  out += "- Mark a value as present when the " + std::string(medium) + " expresses it or shows it being pursued.\n";
  out += "- Mark a value as conflicted when the " + std::string(medium) +
         " contradicts the value or hinders its pursuit.\n";
  out += "- Do not list values the " + std::string(medium) + " does not refer to; they are absent.\n";
  out += "- A value is never both present and conflicted in the same " + std::string(medium) + ".\n";
  out += "- Base your decision on " + std::string(evidence) + ".\n\n";
  out +=
      "Output format:\n"
      "Answer with one line per detected value and nothing else. Each line holds the value name exactly as "
      "listed above, a colon, and either present or conflicted. For example:\n"
      "ACHIEVEMENT: present\n"
      "FACE: conflicted\n"
      "If no value is expressed, answer with NONE.\n";
  return out;
}

}  // namespace

Prompt build_script_prompt(const VideoRecord& video) {
  require_media(video);
  return {PromptTask::ScriptExtraction, std::string(kScriptPrompt), {video.media_path}};
}

Prompt build_value_prompt(PromptTask mode, std::span<const ValueDef> codebook, const VideoRecord& video) {
  if (mode != PromptTask::ValueExtractionDirect) {
    throw Error(ErrorCode::InvalidArgument, "a video subject requires direct value extraction");
  }
  require_full_codebook(codebook);
  require_media(video);
  std::string text = "You are given a TikTok video. ";
  text += theory_block("video");
  text += codebook_block(codebook, "video");
  text += guidelines_block("video", "everything in the video: speech, sound, on-screen text and what is shown");
  return {mode, std::move(text), {video.media_path}};
}

Prompt build_value_prompt(PromptTask mode, std::span<const ValueDef> codebook, const Script& script) {
  if (mode != PromptTask::ValueExtractionScript) {
    throw Error(ErrorCode::InvalidArgument, "a script subject requires script value extraction");
  }
  require_full_codebook(codebook);
  std::string text = "You are given a movie script of a TikTok video. ";
  text += theory_block("script");
  text += codebook_block(codebook, "script");
  text += guidelines_block("script", "everything in the script: dialogue, action and on-screen text");
  text += "\nScript:\n";
  text += serialize_script(script);
  return {mode, std::move(text), {}};
}

std::string reprompt_suffix(std::size_t attempt) {
  return "\n\nYour previous answer (attempt " + std::to_string(attempt) +
         ") could not be read. Answer again using only the output format above: one line per value, "
         "VALUE_NAME: present or VALUE_NAME: conflicted, or NONE.\n";
}

}  // namespace valex
