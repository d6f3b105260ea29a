#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rpys {

enum class ErrorCode {
  NotWosFormat,
  NotScopusFormat,
  Encoding,
  InvalidThreshold,
  UnknownCluster,
  InvalidSplitSubset,
  InvalidDecision,
  EmptyCorpus,
  EmptyPartition,
  SeriesTooShort,
  InvalidK,
  InvalidArgument,
  CorruptSession,
  UnsupportedVersion,
  StaleVersion,
  Io,
};

std::string_view to_string(ErrorCode code);

// Every recoverable failure in the library is reported as an Error carrying a
// machine-readable code. Callers at the edges (CLI, HTTP) map codes to exit
// statuses or response codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rpys
