#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cscope {

// Every failure the library reports carries one of these codes. The names
// double as the `error_code` strings of the HTTP envelope.
enum class ErrorCode {
  // ontology
  InvalidLabel,
  DuplicateLabel,
  UnknownConcept,
  SelfLoop,
  InvalidWeight,
  InvalidTransition,
  IoFailure,
  CorruptSnapshot,
  // enrichment
  UnknownCandidate,
  AlreadyResolved,
  // ingestion
  EmptyDocument,
  InvalidArgument,
  SourceUnavailable,
  UnknownDocument,
  AlreadyPurged,
  Purged,
  // search
  NoFilter,
  EmptyQuery,
  // evaluation
  NegativeCount,
  GExceedsN,
  InvalidG,
  OutOfRange,
  MissingJudgment,
  QuerySetMismatch,
  GMismatch,
  ParseError,
  // service
  BindFailure,
  NotFound,
};

enum class ErrorClass { client, server };

std::string_view error_name(ErrorCode code);
ErrorClass error_class(ErrorCode code);

// HTTP status for a code: 4xx for client errors, 5xx for server errors.
int http_status(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  std::string_view name() const { return error_name(code_); }

 private:
  ErrorCode code_;
};

// All codes, in declaration order.
std::span<const ErrorCode> all_error_codes();

}  // namespace cscope
