#include <algorithm>
#include <cctype>

#include "text_util.hpp"
#include "valex/error.hpp"
#include "valex/parsers.hpp"

namespace valex {
namespace {

std::string_view strip_quotes(std::string_view s) {
  s = detail::trim(s);
  constexpr std::string_view kOpen = "\xE2\x80\x9C";   // left double quotation mark
  constexpr std::string_view kClose = "\xE2\x80\x9D";  // right double quotation mark
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
  if (s.starts_with(kOpen) && s.ends_with(kClose) && s.size() >= kOpen.size() + kClose.size()) {
    return s.substr(kOpen.size(), s.size() - kOpen.size() - kClose.size());
  }
  return s;
}

// A speaker tag is upper-case text (digits, spaces and a few punctuation
// marks allowed) with at least one letter, e.g. "NARRATOR" or "GIRL #2".
bool is_speaker(std::string_view s) {
  if (s.empty() || s.size() > 40) return false;
  bool has_letter = false;
  for (char ch : s) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::islower(c)) return false;
    if (std::isupper(c)) has_letter = true;
    else if (!(std::isdigit(c) || c == ' ' || c == '.' || c == '\'' || c == '-' || c == '#' || c == '&' ||
               c == '(' || c == ')' || c == '/')) {
      return false;
    }
  }
  return has_letter;
}

std::optional<bool> parse_yes_no(std::string_view s) {
  s = detail::trim(s);
  while (!s.empty() && (s.back() == '.' || s.back() == '*')) s.remove_suffix(1);
  if (detail::iequals(s, "yes") || detail::iequals(s, "true") || detail::iequals(s, "y")) return true;
  if (detail::iequals(s, "no") || detail::iequals(s, "false") || detail::iequals(s, "n")) return false;
  return std::nullopt;
}

std::string_view strip_emphasis(std::string_view s) {
  while (!s.empty() && s.front() == '*') s.remove_prefix(1);
  return s;
}

}  // namespace

Script parse_script(std::string_view text, std::string video_id) {
  Script script;
  script.video_id = std::move(video_id);
  bool has_genre = false;
  bool has_sound = false;
  for (const auto raw : detail::split_lines(text)) {
    const auto line = detail::trim(raw);
    if (line.empty() || line.starts_with("```")) continue;
    const auto bare = strip_emphasis(line);
    if (!has_genre && detail::istarts_with(bare, "genre:")) {
      auto value = detail::trim(bare.substr(6));
      while (!value.empty() && value.front() == '*') value.remove_prefix(1);
      script.genre_header = std::string(detail::trim(value));
      has_genre = !script.genre_header.empty();
      continue;
    }
    if (!has_sound && detail::istarts_with(bare, "sound:")) {
      auto value = bare.substr(6);
      while (!value.empty() && value.front() == '*') value.remove_prefix(1);
      const auto yn = parse_yes_no(value);
      if (!yn) {
        throw ParseFailure(ErrorCode::MalformedScript, "sound header must be Yes or No", std::string(text));
      }
      script.sound_header = *yn;
      has_sound = true;
      continue;
    }
    ScriptLine out;
    if (line.size() >= 2 && line.front() == '[' && line.back() == ']') {
      out.kind = ScriptLineKind::Overlay;
      out.text = std::string(line.substr(1, line.size() - 2));
    } else if (const auto colon = line.find(':');
               colon != std::string_view::npos && is_speaker(detail::trim(line.substr(0, colon)))) {
      out.kind = ScriptLineKind::Dialogue;
      out.speaker = std::string(detail::trim(line.substr(0, colon)));
      out.text = std::string(strip_quotes(line.substr(colon + 1)));
    } else {
      out.kind = ScriptLineKind::Action;
      out.text = std::string(line);
    }
    script.body.push_back(std::move(out));
  }
  if (!has_genre) throw ParseFailure(ErrorCode::MalformedScript, "missing 'Genre:' header", std::string(text));
  if (!has_sound) throw ParseFailure(ErrorCode::MalformedScript, "missing 'Sound:' header", std::string(text));
  if (script.body.empty()) throw ParseFailure(ErrorCode::MalformedScript, "script body is empty", std::string(text));
  return script;
}

}  // namespace valex
