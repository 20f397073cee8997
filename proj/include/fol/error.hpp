#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fol {

enum class ErrorKind {
  InvalidArgument,
  InvalidDegree,
  NotExpanding,
  BranchSolveFailure,
  NotHyperbolic,
  ConeViolation,
  NoConvergence,
  ScaleExceeded,
  Infeasible,
  NonPositiveWeight,
  NoOverlap,
  HolonomyOutOfRange,
  DivergentSeries,
  InsufficientData,
  ConfigError,
  ParseError,
  NegativeWeight,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InvalidDegree: return "InvalidDegree";
    case ErrorKind::NotExpanding: return "NotExpanding";
    case ErrorKind::BranchSolveFailure: return "BranchSolveFailure";
    case ErrorKind::NotHyperbolic: return "NotHyperbolic";
    case ErrorKind::ConeViolation: return "ConeViolation";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::ScaleExceeded: return "ScaleExceeded";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::NonPositiveWeight: return "NonPositiveWeight";
    case ErrorKind::NoOverlap: return "NoOverlap";
    case ErrorKind::HolonomyOutOfRange: return "HolonomyOutOfRange";
    case ErrorKind::DivergentSeries: return "DivergentSeries";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::NegativeWeight: return "NegativeWeight";
  }
  return "Unknown";
}

}  // namespace fol
