#include "cscope/error.hpp"

namespace cscope {

std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidLabel: return "InvalidLabel";
    case ErrorCode::DuplicateLabel: return "DuplicateLabel";
    case ErrorCode::UnknownConcept: return "UnknownConcept";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::InvalidWeight: return "InvalidWeight";
    case ErrorCode::InvalidTransition: return "InvalidTransition";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::CorruptSnapshot: return "CorruptSnapshot";
    case ErrorCode::UnknownCandidate: return "UnknownCandidate";
    case ErrorCode::AlreadyResolved: return "AlreadyResolved";
    case ErrorCode::EmptyDocument: return "EmptyDocument";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::SourceUnavailable: return "SourceUnavailable";
    case ErrorCode::UnknownDocument: return "UnknownDocument";
    case ErrorCode::AlreadyPurged: return "AlreadyPurged";
    case ErrorCode::Purged: return "Purged";
    case ErrorCode::NoFilter: return "NoFilter";
    case ErrorCode::EmptyQuery: return "EmptyQuery";
    case ErrorCode::NegativeCount: return "NegativeCount";
    case ErrorCode::GExceedsN: return "GExceedsN";
    case ErrorCode::InvalidG: return "InvalidG";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::MissingJudgment: return "MissingJudgment";
    case ErrorCode::QuerySetMismatch: return "QuerySetMismatch";
    case ErrorCode::GMismatch: return "GMismatch";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::BindFailure: return "BindFailure";
    case ErrorCode::NotFound: return "NotFound";
  }
  return "Unknown";
}

ErrorClass error_class(ErrorCode code) {
  switch (code) {
    case ErrorCode::IoFailure:
    case ErrorCode::CorruptSnapshot:
    case ErrorCode::SourceUnavailable:
    case ErrorCode::BindFailure:
      return ErrorClass::server;
    default:
      return ErrorClass::client;
  }
}

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownConcept:
    case ErrorCode::UnknownCandidate:
    case ErrorCode::UnknownDocument:
    case ErrorCode::NotFound:
      return 404;
    case ErrorCode::DuplicateLabel:
    case ErrorCode::AlreadyResolved:
    case ErrorCode::AlreadyPurged:
    case ErrorCode::InvalidTransition:
      return 409;
    case ErrorCode::Purged:
      return 410;
    case ErrorCode::SourceUnavailable:
      return 502;
    case ErrorCode::IoFailure:
    case ErrorCode::CorruptSnapshot:
    case ErrorCode::BindFailure:
      return 500;
    default:
      return 400;
  }
}

std::span<const ErrorCode> all_error_codes() {
  static constexpr ErrorCode codes[] = {
      ErrorCode::InvalidLabel,     ErrorCode::DuplicateLabel,
      ErrorCode::UnknownConcept,   ErrorCode::SelfLoop,
      ErrorCode::InvalidWeight,    ErrorCode::InvalidTransition,
      ErrorCode::IoFailure,        ErrorCode::CorruptSnapshot,
      ErrorCode::UnknownCandidate, ErrorCode::AlreadyResolved,
      ErrorCode::EmptyDocument,    ErrorCode::InvalidArgument,
      ErrorCode::SourceUnavailable, ErrorCode::UnknownDocument,
      ErrorCode::AlreadyPurged,    ErrorCode::Purged,
      ErrorCode::NoFilter,         ErrorCode::EmptyQuery,
      ErrorCode::NegativeCount,    ErrorCode::GExceedsN,
      ErrorCode::InvalidG,         ErrorCode::OutOfRange,
      ErrorCode::MissingJudgment,  ErrorCode::QuerySetMismatch,
      ErrorCode::GMismatch,        ErrorCode::ParseError,
      ErrorCode::BindFailure,      ErrorCode::NotFound,
  };
  return codes;
}

}  // namespace cscope
