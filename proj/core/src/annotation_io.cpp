#include "valex/annotation_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <tuple>

#include "text_util.hpp"
#include "valex/error.hpp"

namespace valex {
namespace {

constexpr std::string_view kHeader = "video_id,annotator_id,value_name,label";

[[noreturn]] void fail(std::string_view source, std::size_t line, const std::string& msg) {
  throw Error(ErrorCode::Parse, std::string(source) + ":" + std::to_string(line) + ": " + msg);
}

}  // namespace

std::vector<AnnotationRow> parse_annotation_rows(std::string_view text, std::string_view source) {
  std::vector<AnnotationRow> rows;
  std::size_t line_no = 0;
  for (const auto raw_line : detail::split_lines(text)) {
    ++line_no;
    const auto line = detail::trim(raw_line);
    if (line.empty() || line.front() == '#') continue;
    const char delim = line.find('\t') != std::string_view::npos ? '\t' : ',';
    auto fields = detail::split(line, delim);
    for (auto& f : fields) f = detail::trim(f);
    if (fields.size() == 4 && fields[0] == "video_id" && fields[2] == "value_name") continue;
    if (fields.size() != 4) fail(source, line_no, "expected 4 fields, got " + std::to_string(fields.size()));
    if (fields[0].empty()) fail(source, line_no, "empty video_id");

    AnnotationRow row;
    row.video_id = std::string(fields[0]);
    row.annotator_id = std::string(fields[1]);
    row.line = line_no;

    auto label_text = fields[3];
    if (!label_text.empty() && label_text.front() == '+') label_text.remove_prefix(1);
    long label_value = 0;
    const auto [ptr, ec] = std::from_chars(label_text.data(), label_text.data() + label_text.size(), label_value);
    const auto label = (ec == std::errc{} && ptr == label_text.data() + label_text.size())
                           ? label_from_int(label_value)
                           : std::nullopt;
    if (!label) fail(source, line_no, "label must be -1, 0 or +1, got '" + std::string(fields[3]) + "'");
    row.label = *label;

    if (normalize_value_name(fields[2]) == kNoValueMarker) {
      if (row.label != Label::Absent) fail(source, line_no, "NONE marker must carry label 0");
    } else {
      row.value = value_index(fields[2]);
      if (!row.value) fail(source, line_no, "unknown value '" + std::string(fields[2]) + "'");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<AnnotationRow> read_annotation_rows(const std::filesystem::path& path) {
  return parse_annotation_rows(detail::read_file(path), path.string());
}

std::map<std::pair<std::string, std::string>, AnnotationVector> group_by_rater(
    const std::vector<AnnotationRow>& rows) {
  std::map<std::pair<std::string, std::string>, AnnotationVector> out;
  std::map<std::tuple<std::string, std::string, std::size_t>, std::size_t> seen_at;
  for (const auto& row : rows) {
    auto key = std::make_pair(row.video_id, row.annotator_id);
    auto [it, inserted] = out.try_emplace(key, AnnotationVector(row.annotator_id.empty()
                                                                    ? std::nullopt
                                                                    : std::optional(row.annotator_id)));
    if (!row.value) continue;
    auto& vec = it->second;
    const auto seen = seen_at.try_emplace({row.video_id, row.annotator_id, *row.value}, row.line);
    if (!seen.second && vec[*row.value] != row.label) {
      throw Error(ErrorCode::Parse, "line " + std::to_string(row.line) + ": conflicting label for " +
                                        row.video_id + "/" + value_catalog()[*row.value].name +
                                        " (first given on line " + std::to_string(seen.first->second) + ")");
    }
    vec.set(*row.value, row.label);
  }
  return out;
}

GoldSet gold_from_rows(const std::vector<AnnotationRow>& rows) {
  GoldSet gold;
  std::map<std::string, std::string> annotator_of;
  for (auto& [key, vec] : group_by_rater(rows)) {
    const auto [it, inserted] = annotator_of.try_emplace(key.first, key.second);
    if (!inserted) {
      throw Error(ErrorCode::InvalidArgument, "video " + key.first + " has labels from more than one annotator ('" +
                                                  it->second + "', '" + key.second + "')");
    }
    gold.emplace(key.first, vec);
  }
  return gold;
}

GoldSet read_gold(const std::filesystem::path& path) { return gold_from_rows(read_annotation_rows(path)); }

std::map<std::string, Resolution> resolutions_from_rows(const std::vector<AnnotationRow>& rows,
                                                        std::string_view annotator_id) {
  std::map<std::string, Resolution> out;
  for (const auto& row : rows) {
    if (row.annotator_id != annotator_id) continue;
    auto& res = out[row.video_id];
    if (row.value) res[*row.value] = row.label;
  }
  return out;
}

std::string format_annotations(const GoldSet& vectors, std::string_view default_annotator) {
  std::ostringstream os;
  os << kHeader << '\n';
  for (const auto& [video_id, vec] : vectors) {
    const std::string annotator = vec.annotator_id().value_or(std::string(default_annotator));
    if (vec.label_count() == 0) {
      os << video_id << ',' << annotator << ',' << kNoValueMarker << ",0\n";
      continue;
    }
    for (std::size_t v = 0; v < kValueCount; ++v) {
      if (vec[v] == Label::Absent) continue;
      os << video_id << ',' << annotator << ',' << value_catalog()[v].name << ','
         << (vec[v] == Label::Present ? "+1" : "-1") << '\n';
    }
  }
  return os.str();
}

void write_annotations(const std::filesystem::path& path, const GoldSet& vectors,
                       std::string_view default_annotator) {
  detail::write_file_atomic(path, format_annotations(vectors, default_annotator));
}

}  // namespace valex
