#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace mh {

enum class ErrorCode {
  InvalidArgument,
  NotInvertible,
  NotCoprime,
  NotApplicable,
  DimensionMismatch,
  ModulusMismatch,
  VerificationFailed,
  ConstraintFailed,
  Condition1Violation,
  CapExceeded,
  NotMaterializable,
  LimitExceeded,
  OrderTooLarge,
  Overflow,
  ParseError,
  UnknownName,
  InternalError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised by condition1_verify; carries every invariant that failed, by name.
class Condition1Error : public Error {
 public:
  explicit Condition1Error(std::vector<std::string> failures);
  const std::vector<std::string>& failures() const noexcept { return failures_; }

 private:
  std::vector<std::string> failures_;
};

}  // namespace mh
