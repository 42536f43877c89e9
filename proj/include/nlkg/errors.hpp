#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nlkg {

enum class ErrorKind {
  NonPositiveCoefficient,
  RegimeViolation,
  DomainViolation,
  PreconditionViolation,
  GridMismatch,
  InvalidConfig,
  IntegrationBlowup,
  ToleranceFailure,
  ConvergenceFailure,
  NumericBlowup,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonPositiveCoefficient: return "NonPositiveCoefficient";
    case ErrorKind::RegimeViolation: return "RegimeViolation";
    case ErrorKind::DomainViolation: return "DomainViolation";
    case ErrorKind::PreconditionViolation: return "PreconditionViolation";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::IntegrationBlowup: return "IntegrationBlowup";
    case ErrorKind::ToleranceFailure: return "ToleranceFailure";
    case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorKind::NumericBlowup: return "NumericBlowup";
  }
  return "Unknown";
}

/// Numerical failures (as opposed to bad input). The CLI maps these to exit
/// code 3 and everything else to exit code 2.
constexpr bool is_numerical_failure(ErrorKind kind) {
  return kind == ErrorKind::IntegrationBlowup || kind == ErrorKind::ToleranceFailure ||
         kind == ErrorKind::ConvergenceFailure || kind == ErrorKind::NumericBlowup;
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace nlkg
