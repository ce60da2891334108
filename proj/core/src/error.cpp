#include "valex/error.hpp"

namespace valex {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NotFound: return "not-found";
    case ErrorCode::MalformedVector: return "malformed-vector";
    case ErrorCode::Parse: return "parse";
    case ErrorCode::DuplicateId: return "duplicate-id";
    case ErrorCode::UnknownGenre: return "unknown-genre";
    case ErrorCode::InfeasibleSplit: return "infeasible-split";
    case ErrorCode::MissingGold: return "missing-gold";
    case ErrorCode::IncompleteResolution: return "incomplete-resolution";
    case ErrorCode::EmptyInput: return "empty-input";
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::MissingMedia: return "missing-media";
    case ErrorCode::IncompleteCodebook: return "incomplete-codebook";
    case ErrorCode::BackendUnavailable: return "backend-unavailable";
    case ErrorCode::Configuration: return "configuration";
    case ErrorCode::MalformedScript: return "malformed-script";
    case ErrorCode::UnknownValue: return "unknown-value";
    case ErrorCode::Contradiction: return "contradiction";
    case ErrorCode::ExtractionFailed: return "extraction-failed";
    case ErrorCode::EmptyLabelSpace: return "empty-labelspace";
    case ErrorCode::EmptyCorpus: return "empty-corpus";
    case ErrorCode::InconsistentLabelSpace: return "inconsistent-labelspace";
    case ErrorCode::MissingData: return "missing-data";
    case ErrorCode::ModelLoad: return "model-load";
    case ErrorCode::Alignment: return "alignment";
    case ErrorCode::EmptyPartition: return "empty-partition";
    case ErrorCode::IncompatibleReports: return "incompatible-reports";
    case ErrorCode::Precondition: return "precondition";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace valex
