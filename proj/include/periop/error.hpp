#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace periop {

enum class ErrorCode {
  InvalidArgument,
  InvalidSchema,
  IoError,
  UnparseableCell,
  UnknownColumn,
  MissingColumn,
  MissingOutcome,
  UnknownOutcome,
  UnknownVariable,
  EmptyPartition,
  UnmappedLevel,
  NoObservedValues,
  OneClassOnly,
  EmptyInput,
  InvalidProbability,
  MissingValuePresent,
  ConstantFactor,
  SingularHessian,
  DimensionMismatch,
  EmptyNode,
  TooShort,
  InvalidSpec,
  UnknownPreset,
  InvalidConfig,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every library failure surfaces as this exception; `code()` is what the CLI
// reports in its machine-readable error record.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace periop
