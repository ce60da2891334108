#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "valex/domain.hpp"

namespace valex {

/// video_id -> label vector. Ordered so iteration (and thus every report
/// built from it) is deterministic.
using GoldSet = std::map<std::string, AnnotationVector>;

/// One row of the long-form annotation file:
///   video_id,annotator_id,value_name,label
/// Labels are -1 or +1; omitted (video, value) pairs are Absent. An explicit 0
/// is accepted (a resolver may settle a dispute as Absent), and the marker
/// value name NONE with label 0 records a video annotated with no values.
struct AnnotationRow {
  std::string video_id;
  std::string annotator_id;
  std::optional<std::size_t> value;  // nullopt for the NONE marker
  Label label = Label::Absent;
  std::size_t line = 0;
};

inline constexpr std::string_view kNoValueMarker = "NONE";

/// Throws Error(Parse) with "source:line:" prefix on malformed rows.
std::vector<AnnotationRow> parse_annotation_rows(std::string_view text, std::string_view source = "<input>");
std::vector<AnnotationRow> read_annotation_rows(const std::filesystem::path& path);

/// (video_id, annotator_id) -> vector; annotator_id is stored on the vector.
/// Conflicting duplicate rows raise Error(Parse).
std::map<std::pair<std::string, std::string>, AnnotationVector> group_by_rater(
    const std::vector<AnnotationRow>& rows);

/// Collapses rows to one vector per video. A video annotated by more than one
/// annotator id raises Error(InvalidArgument).
GoldSet gold_from_rows(const std::vector<AnnotationRow>& rows);
GoldSet read_gold(const std::filesystem::path& path);

/// Sparse explicit labels given by one annotator: value index -> label.
using Resolution = std::map<std::size_t, Label>;
std::map<std::string, Resolution> resolutions_from_rows(const std::vector<AnnotationRow>& rows,
                                                        std::string_view annotator_id);

/// Renders vectors in long form, header first, videos in key order.
std::string format_annotations(const GoldSet& vectors, std::string_view default_annotator = "");
void write_annotations(const std::filesystem::path& path, const GoldSet& vectors,
                       std::string_view default_annotator = "");

}  // namespace valex
