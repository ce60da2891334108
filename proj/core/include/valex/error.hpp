#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace valex {

enum class ErrorCode {
  NotFound,
  MalformedVector,
  Parse,
  DuplicateId,
  UnknownGenre,
  InfeasibleSplit,
  MissingGold,
  IncompleteResolution,
  EmptyInput,
  InvalidArgument,
  MissingMedia,
  IncompleteCodebook,
  BackendUnavailable,
  Configuration,
  MalformedScript,
  UnknownValue,
  Contradiction,
  ExtractionFailed,
  EmptyLabelSpace,
  EmptyCorpus,
  InconsistentLabelSpace,
  MissingData,
  ModelLoad,
  Alignment,
  EmptyPartition,
  IncompatibleReports,
  Precondition,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

/// All library failures are reported as valex::Error; code() identifies the
/// contract that was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Parse failure that keeps the offending raw text for later inspection.
class ParseFailure : public Error {
 public:
  ParseFailure(ErrorCode code, const std::string& message, std::string raw_text)
      : Error(code, message), raw_text_(std::move(raw_text)) {}

  const std::string& raw_text() const noexcept { return raw_text_; }

 private:
  std::string raw_text_;
};

}  // namespace valex
