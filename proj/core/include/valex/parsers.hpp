#pragma once

#include <string>
#include <string_view>

#include "valex/domain.hpp"

namespace valex {

/// Reads the screenplay grammar:
///   Genre: <text>
///   Sound: Yes|No
///   [overlay text]
///   SPEAKER: "dialogue"
///   any other non-empty line is action
/// Throws ParseFailure(MalformedScript) when a header is missing or the body
/// is empty. Markdown code fences are ignored.
Script parse_script(std::string_view text, std::string video_id = {});

/// Reads model answers of the form "VALUE_NAME: present|conflicted", one per
/// line (commas and semicolons also separate entries). Value names are
/// case-folded with spaces and dashes normalized. Also accepted: numeric
/// labels ("FACE: -1"), a trailing "(1)" / "(-1)", bullets, and NONE.
///
/// Throws ParseFailure with code Parse (unreadable entry), UnknownValue (all
/// offending names listed), or Contradiction (value both present and
/// conflicted).
AnnotationVector parse_value_response(std::string_view text);

/// Canonical answer text; parse_value_response() inverts it exactly.
std::string render_value_response(const AnnotationVector& labels);

}  // namespace valex
