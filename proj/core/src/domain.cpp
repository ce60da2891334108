#include "valex/domain.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>

#include <fmt/format.h>

#include "valex/error.hpp"

namespace valex {

int to_int(Label label) noexcept { return static_cast<int>(label); }

std::optional<Label> label_from_int(long value) noexcept {
  switch (value) {
    case -1: return Label::Conflicted;
    case 0: return Label::Absent;
    case 1: return Label::Present;
    default: return std::nullopt;
  }
}

std::string to_string(LabelPair pair) {
  std::string out = value_catalog()[pair.value].name;
  out.push_back(pair.polarity == Polarity::Present ? '+' : '-');
  return out;
}

LabelPair parse_label_pair(std::string_view text) {
  if (text.size() >= 2 && (text.back() == '+' || text.back() == '-')) {
    if (const auto index = value_index(text.substr(0, text.size() - 1))) {
      return {*index, text.back() == '+' ? Polarity::Present : Polarity::Conflicted};
    }
  }
  throw Error(ErrorCode::UnknownValue, "not a label pair: '" + std::string(text) + "'");
}

Label AnnotationVector::at(std::string_view value_name) const {
  const auto index = value_index(value_name);
  if (!index) throw Error(ErrorCode::NotFound, "no value named '" + std::string(value_name) + "'");
  return labels_[*index];
}

void AnnotationVector::set(std::string_view value_name, Label label) {
  const auto index = value_index(value_name);
  if (!index) throw Error(ErrorCode::NotFound, "no value named '" + std::string(value_name) + "'");
  labels_[*index] = label;
}

std::size_t AnnotationVector::label_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(labels_.begin(), labels_.end(), [](Label l) { return l != Label::Absent; }));
}

BinaryLabelVector flatten(const AnnotationVector& vector) {
  BinaryLabelVector bits;
  for (std::size_t v = 0; v < kValueCount; ++v) {
    if (vector[v] == Label::Present) bits.set({v, Polarity::Present});
    if (vector[v] == Label::Conflicted) bits.set({v, Polarity::Conflicted});
  }
  return bits;
}

AnnotationVector unflatten(const BinaryLabelVector& bits) {
  AnnotationVector out;
  for (std::size_t v = 0; v < kValueCount; ++v) {
    const bool p = bits.present(v);
    const bool c = bits.conflicted(v);
    if (p && c) {
      throw Error(ErrorCode::MalformedVector,
                  "value " + value_catalog()[v].name + " is both present and conflicted");
    }
    if (p) out.set(v, Label::Present);
    if (c) out.set(v, Label::Conflicted);
  }
  return out;
}

namespace {

struct GenreName {
  Genre genre;
  std::string_view id;
  std::string_view display;
};

constexpr std::array<GenreName, kGenreCount> kGenres{{
    {Genre::BeautySkincare, "beauty_skincare", "beauty and skincare"},
    {Genre::Lifestyle, "lifestyle", "lifestyle"},
    {Genre::EntertainmentPranks, "entertainment_pranks", "entertainment and pranks"},
    {Genre::CraftsDiy, "crafts_diy", "crafts and diy"},
    {Genre::Vlogging, "vlogging", "vlogging"},
    {Genre::GamingDancing, "gaming_dancing", "gaming and dancing"},
    {Genre::SingingLipSyncing, "singing_lipsyncing", "singing and lip-syncing"},
}};

std::string genre_key(std::string_view text) {
  std::string key;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) key.push_back(static_cast<char>(std::tolower(c)));
    else if (ch == '&') key += "and";
  }
  return key;
}

}  // namespace

std::string_view to_string(Genre genre) noexcept {
  return kGenres[static_cast<std::size_t>(genre)].id;
}

std::optional<Genre> parse_genre(std::string_view text) noexcept {
  try {
    const auto key = genre_key(text);
    for (const auto& g : kGenres) {
      if (key == genre_key(g.id) || key == genre_key(g.display)) return g.genre;
    }
    // "crafts and dyi" appears in some source lists.
    if (key == "craftsanddyi") return Genre::CraftsDiy;
  } catch (...) {
  }
  return std::nullopt;
}

namespace {

bool read_int(std::string_view text, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > text.size()) return false;
  const auto* first = text.data() + pos;
  const auto [ptr, ec] = std::from_chars(first, first + len, out);
  return ec == std::errc{} && ptr == first + len;
}

}  // namespace

std::optional<Timestamp> parse_iso8601(std::string_view text) noexcept {
  using namespace std::chrono;
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  if (!read_int(text, 0, 4, y) || text.size() < 10 || text[4] != '-' || text[7] != '-' ||
      !read_int(text, 5, 2, mo) || !read_int(text, 8, 2, d)) {
    return std::nullopt;
  }
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  std::size_t pos = 10;
  long offset_seconds = 0;
  if (pos < text.size()) {
    if (text[pos] != 'T' && text[pos] != ' ') return std::nullopt;
    if (!read_int(text, pos + 1, 2, h) || pos + 3 >= text.size() || text[pos + 3] != ':' ||
        !read_int(text, pos + 4, 2, mi)) {
      return std::nullopt;
    }
    pos += 6;
    if (pos < text.size() && text[pos] == ':') {
      if (!read_int(text, pos + 1, 2, s)) return std::nullopt;
      pos += 3;
      // Fractional seconds are accepted and dropped.
      if (pos < text.size() && text[pos] == '.') {
        ++pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
      }
    }
    if (h > 23 || mi > 59 || s > 60) return std::nullopt;
    if (pos < text.size()) {
      if (text[pos] == 'Z' && pos + 1 == text.size()) {
        pos += 1;
      } else if ((text[pos] == '+' || text[pos] == '-') && pos + 6 == text.size() && text[pos + 3] == ':') {
        int oh = 0, om = 0;
        if (!read_int(text, pos + 1, 2, oh) || !read_int(text, pos + 4, 2, om)) return std::nullopt;
        offset_seconds = (oh * 3600L + om * 60L) * (text[pos] == '+' ? 1 : -1);
        pos += 6;
      } else {
        return std::nullopt;
      }
    }
  }
  const auto local = sys_days{ymd} + hours{h} + minutes{mi} + seconds{s};
  return time_point_cast<seconds>(local - seconds{offset_seconds});
}

std::string format_iso8601(Timestamp ts) {
  using namespace std::chrono;
  const auto day_point = floor<days>(ts);
  const year_month_day ymd{day_point};
  const hh_mm_ss hms{ts - day_point};
  return fmt::format("{:04d}-{:02d}-{:02d}T{:02d}:{:02d}:{:02d}Z", static_cast<int>(ymd.year()),
                     static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), hms.hours().count(),
                     hms.minutes().count(), hms.seconds().count());
}

std::string serialize_script(const Script& script) {
  std::string out = "Genre: " + script.genre_header + "\n";
  out += script.sound_header ? "Sound: Yes\n" : "Sound: No\n";
  for (const auto& line : script.body) {
    switch (line.kind) {
      case ScriptLineKind::Dialogue:
        out += line.speaker + ": \"" + line.text + "\"\n";
        break;
      case ScriptLineKind::Overlay:
        out += "[" + line.text + "]\n";
        break;
      case ScriptLineKind::Action:
        out += line.text + "\n";
        break;
    }
  }
  return out;
}

}  // namespace valex
