#include <array>
#include <cctype>
#include <charconv>

#include "text_util.hpp"
#include "valex/error.hpp"
#include "valex/parsers.hpp"

namespace valex {
namespace {

struct Keyword {
  std::string_view word;
  Label label;
};

// Longest first so "conflicted" is not read as "conflict" + "ed".
constexpr std::array<Keyword, 7> kKeywords{{
    {"contradicted", Label::Conflicted},
    {"conflicting", Label::Conflicted},
    {"conflicted", Label::Conflicted},
    {"conflict", Label::Conflicted},
    {"present", Label::Present},
    {"absent", Label::Absent},
    {"none", Label::Absent},
}};

bool is_separator(char c) { return c == ':' || c == '=' || c == '-' || c == ' ' || c == '\t' || c == '|'; }

std::string_view strip_trailing_separators(std::string_view s) {
  for (;;) {
    while (!s.empty() && is_separator(s.back())) s.remove_suffix(1);
    // en/em dash
    if (s.size() >= 3 && static_cast<unsigned char>(s[s.size() - 3]) == 0xE2 &&
        static_cast<unsigned char>(s[s.size() - 2]) == 0x80) {
      s.remove_suffix(3);
      continue;
    }
    return s;
  }
}

std::string_view strip_bullet(std::string_view s) {
  s = detail::trim(s);
  while (!s.empty() && (s.front() == '*' || s.front() == '#')) s.remove_prefix(1);
  s = detail::trim(s);
  if (s.size() >= 2 && (s.front() == '-' || s.front() == '+') && s[1] == ' ') s = detail::trim(s.substr(2));
  if (s.starts_with("\xE2\x80\xA2")) s = detail::trim(s.substr(3));  // bullet
  std::size_t digits = 0;
  while (digits < s.size() && std::isdigit(static_cast<unsigned char>(s[digits]))) ++digits;
  if (digits > 0 && digits + 1 < s.size() && (s[digits] == '.' || s[digits] == ')') && s[digits + 1] == ' ') {
    s = detail::trim(s.substr(digits + 1));
  }
  while (!s.empty() && (s.back() == '.' || s.back() == '*')) s.remove_suffix(1);
  return detail::trim(s);
}

std::optional<Label> parse_numeric(std::string_view s) {
  s = detail::trim(s);
  if (s == "+") return Label::Present;
  if (s == "-") return Label::Conflicted;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return label_from_int(v);
}

struct Entry {
  std::string name;
  Label label = Label::Absent;
};

// nullopt: unreadable.
std::optional<Entry> parse_entry(std::string_view entry) {
  std::string_view body = entry;
  // Trailing "(1)" / "(-1)".
  if (!body.empty() && body.back() == ')') {
    const auto open = body.rfind('(');
    if (open != std::string_view::npos) {
      if (const auto label = parse_numeric(body.substr(open + 1, body.size() - open - 2))) {
        const auto name = strip_trailing_separators(body.substr(0, open));
        if (name.empty()) return std::nullopt;
        return Entry{std::string(name), *label};
      }
    }
  }
  const auto lower = detail::to_lower(body);
  for (const auto& kw : kKeywords) {
    if (lower.size() > kw.word.size() && lower.ends_with(kw.word)) {
      const auto before = body.substr(0, body.size() - kw.word.size());
      if (!before.empty() && std::isalnum(static_cast<unsigned char>(before.back()))) continue;
      const auto name = strip_trailing_separators(before);
      if (name.empty()) return std::nullopt;
      return Entry{std::string(name), kw.label};
    }
  }
  // Numeric label after the last colon, or after the last space.
  auto cut = body.rfind(':');
  if (cut == std::string_view::npos) cut = body.rfind(' ');
  if (cut == std::string_view::npos) return std::nullopt;
  const auto label = parse_numeric(body.substr(cut + 1));
  if (!label) return std::nullopt;
  const auto name = strip_trailing_separators(body.substr(0, cut));
  if (name.empty()) return std::nullopt;
  return Entry{std::string(name), *label};
}

bool is_empty_answer(std::string_view s) {
  return detail::iequals(s, "none") || detail::iequals(s, "no values") || detail::iequals(s, "n/a");
}

}  // namespace

AnnotationVector parse_value_response(std::string_view text) {
  AnnotationVector out;
  std::array<bool, kValueCount> seen_present{};
  std::array<bool, kValueCount> seen_conflicted{};
  std::vector<std::string> unknown;
  std::vector<std::string> contradicted;

  for (const auto raw_line : detail::split_lines(text)) {
    const auto line = detail::trim(raw_line);
    if (line.empty() || line.starts_with("```")) continue;
    std::vector<std::string_view> entries;
    for (const auto piece : detail::split(line, ';')) {
      for (const auto e : detail::split(piece, ',')) entries.push_back(e);
    }
    for (const auto raw_entry : entries) {
      const auto e = strip_bullet(raw_entry);
      if (e.empty() || is_empty_answer(e)) continue;
      const auto entry = parse_entry(e);
      if (!entry) {
        throw ParseFailure(ErrorCode::Parse, "unreadable answer entry '" + std::string(e) + "'", std::string(text));
      }
      const auto index = value_index(entry->name);
      if (!index) {
        unknown.push_back(entry->name);
        continue;
      }
      if (entry->label == Label::Present) seen_present[*index] = true;
      if (entry->label == Label::Conflicted) seen_conflicted[*index] = true;
    }
  }
  if (!unknown.empty()) {
    std::string list;
    for (std::size_t i = 0; i < unknown.size(); ++i) list += (i ? ", " : "") + unknown[i];
    throw ParseFailure(ErrorCode::UnknownValue, "unknown value name(s): " + list, std::string(text));
  }
  for (std::size_t v = 0; v < kValueCount; ++v) {
    if (seen_present[v] && seen_conflicted[v]) contradicted.push_back(value_catalog()[v].name);
    else if (seen_present[v]) out.set(v, Label::Present);
    else if (seen_conflicted[v]) out.set(v, Label::Conflicted);
  }
  if (!contradicted.empty()) {
    std::string list;
    for (std::size_t i = 0; i < contradicted.size(); ++i) list += (i ? ", " : "") + contradicted[i];
    throw ParseFailure(ErrorCode::Contradiction, "reported both present and conflicted: " + list,
                       std::string(text));
  }
  return out;
}

std::string render_value_response(const AnnotationVector& labels) {
  std::string out;
  for (std::size_t v = 0; v < kValueCount; ++v) {
    if (labels[v] == Label::Absent) continue;
    out += value_catalog()[v].name;
    out += labels[v] == Label::Present ? ": present\n" : ": conflicted\n";
  }
  return out.empty() ? "NONE\n" : out;
}

}  // namespace valex
