#pragma once

#include <array>
#include <bitset>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace valex {

inline constexpr std::size_t kValueCount = 19;
inline constexpr std::size_t kPairCount = 2 * kValueCount;

/// One of the 19 personal values of the codebook.
struct ValueDef {
  std::string name;          // canonical ASCII identifier, e.g. "SELF-DIRECTION-THOUGHT"
  std::string display_name;  // typographic form, e.g. "SELF-DIRECTION–THOUGHT"
  std::string definition;
  std::vector<std::string> positive_examples;
  std::vector<std::string> conflicted_examples;
};

/// The fixed catalog, in codebook order.
std::span<const ValueDef> value_catalog() noexcept;

/// Looks up a value by name. Accepts canonical or display spelling in any
/// case; throws Error(NotFound) otherwise.
const ValueDef& find_value(std::string_view name);

/// Catalog index of a value name after normalization, if it resolves.
std::optional<std::size_t> value_index(std::string_view name) noexcept;

/// Upper-cases and maps spaces, underscores, and unicode dashes to '-'.
std::string normalize_value_name(std::string_view raw);

enum class Label : std::int8_t { Conflicted = -1, Absent = 0, Present = 1 };

int to_int(Label label) noexcept;
/// Accepts -1, 0, +1 (and "1").
std::optional<Label> label_from_int(long value) noexcept;

enum class Polarity : std::uint8_t { Present = 0, Conflicted = 1 };

/// A (value, polarity) pair: one of the 38 binary targets.
struct LabelPair {
  std::size_t value = 0;
  Polarity polarity = Polarity::Present;

  std::size_t flat_index() const noexcept { return 2 * value + static_cast<std::size_t>(polarity); }
  static LabelPair from_flat_index(std::size_t index) noexcept {
    return {index / 2, static_cast<Polarity>(index % 2)};
  }

  friend auto operator<=>(const LabelPair&, const LabelPair&) = default;
};

/// "ACHIEVEMENT+" / "FACE-".
std::string to_string(LabelPair pair);
/// Inverse of to_string(LabelPair); throws Error(UnknownValue).
LabelPair parse_label_pair(std::string_view text);

/// Per-video assignment of a Label to every catalog value.
class AnnotationVector {
 public:
  AnnotationVector() { labels_.fill(Label::Absent); }
  explicit AnnotationVector(std::optional<std::string> annotator_id) : AnnotationVector() {
    annotator_id_ = std::move(annotator_id);
  }

  Label operator[](std::size_t value) const { return labels_.at(value); }
  Label at(std::string_view value_name) const;

  void set(std::size_t value, Label label) { labels_.at(value) = label; }
  void set(std::string_view value_name, Label label);

  /// Number of non-Absent entries.
  std::size_t label_count() const noexcept;

  const std::array<Label, kValueCount>& labels() const noexcept { return labels_; }
  const std::optional<std::string>& annotator_id() const noexcept { return annotator_id_; }
  void set_annotator_id(std::optional<std::string> id) { annotator_id_ = std::move(id); }

  bool same_labels(const AnnotationVector& other) const noexcept { return labels_ == other.labels_; }

  friend bool operator==(const AnnotationVector&, const AnnotationVector&) = default;

 private:
  std::array<Label, kValueCount> labels_{};
  std::optional<std::string> annotator_id_;
};

/// Flattened 38-bit target: bit 2v is present(v), bit 2v+1 is conflicted(v).
class BinaryLabelVector {
 public:
  bool get(LabelPair pair) const { return bits_.test(pair.flat_index()); }
  bool present(std::size_t value) const { return bits_.test(2 * value); }
  bool conflicted(std::size_t value) const { return bits_.test(2 * value + 1); }
  void set(LabelPair pair, bool on = true) { bits_.set(pair.flat_index(), on); }

  std::size_t count() const noexcept { return bits_.count(); }
  const std::bitset<kPairCount>& bits() const noexcept { return bits_; }

  friend bool operator==(const BinaryLabelVector&, const BinaryLabelVector&) = default;

 private:
  std::bitset<kPairCount> bits_;
};

BinaryLabelVector flatten(const AnnotationVector& vector);
/// Throws Error(MalformedVector) if any value has both bits set.
AnnotationVector unflatten(const BinaryLabelVector& bits);

enum class Genre : std::uint8_t {
  BeautySkincare,
  Lifestyle,
  EntertainmentPranks,
  CraftsDiy,
  Vlogging,
  GamingDancing,
  SingingLipSyncing,
};
inline constexpr std::size_t kGenreCount = 7;

std::string_view to_string(Genre genre) noexcept;
/// Accepts canonical ids ("crafts_diy") and display names ("Crafts and DIY").
std::optional<Genre> parse_genre(std::string_view text) noexcept;

using Timestamp = std::chrono::sys_seconds;

/// Parses "YYYY-MM-DD", "YYYY-MM-DDTHH:MM[:SS][Z|+HH:MM]".
std::optional<Timestamp> parse_iso8601(std::string_view text) noexcept;
std::string format_iso8601(Timestamp ts);

struct VideoRecord {
  std::string video_id;
  std::string influencer_id;
  Genre genre = Genre::Lifestyle;
  std::string media_path;
  bool has_verbal_sound = true;
  bool pinned = false;
  Timestamp retrieved_at{};

  friend bool operator==(const VideoRecord&, const VideoRecord&) = default;
};

enum class ScriptLineKind : std::uint8_t { Action, Dialogue, Overlay };

struct ScriptLine {
  ScriptLineKind kind = ScriptLineKind::Action;
  std::string speaker;  // dialogue only
  std::string text;

  friend bool operator==(const ScriptLine&, const ScriptLine&) = default;
};

/// Screenplay-style text generated from a video.
struct Script {
  std::string video_id;
  std::string genre_header;
  bool sound_header = false;
  std::vector<ScriptLine> body;

  friend bool operator==(const Script&, const Script&) = default;
};

/// Header lines followed by body lines, one per line, in the same grammar
/// that parse_script() reads.
std::string serialize_script(const Script& script);

}  // namespace valex
