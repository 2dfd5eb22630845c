#include "mh/error.hpp"

namespace mh {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotInvertible: return "NotInvertible";
    case ErrorCode::NotCoprime: return "NotCoprime";
    case ErrorCode::NotApplicable: return "NotApplicable";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ModulusMismatch: return "ModulusMismatch";
    case ErrorCode::VerificationFailed: return "VerificationFailed";
    case ErrorCode::ConstraintFailed: return "ConstraintFailed";
    case ErrorCode::Condition1Violation: return "Condition1Violation";
    case ErrorCode::CapExceeded: return "CapExceeded";
    case ErrorCode::NotMaterializable: return "NotMaterializable";
    case ErrorCode::LimitExceeded: return "LimitExceeded";
    case ErrorCode::OrderTooLarge: return "OrderTooLarge";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownName: return "UnknownName";
    case ErrorCode::InternalError: return "InternalError";
  }
  return "Error";
}

namespace {
std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) {
    if (!s.empty()) s += ", ";
    s += x;
  }
  return s;
}
}  // namespace

Condition1Error::Condition1Error(std::vector<std::string> failures)
    : Error(ErrorCode::Condition1Violation, "failed invariants: " + join(failures)),
      failures_(std::move(failures)) {}

}  // namespace mh
