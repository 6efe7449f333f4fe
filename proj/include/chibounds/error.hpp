#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace chibounds {

enum class ErrorKind {
  NonSquare,
  Asymmetric,
  NotPositiveDefinite,
  SingularBlock,
  RouteMismatch,
  OutOfRange,
  BadShape,
  BadPartition,
  SingularTransform,
  PairingFailure,
  BadSpin,
  DimensionMismatch,
  NotHermitian,
  BadCutoff,
  TruncationOverflow,
  DegenerateSeries,
  WindowTooSmall,
  ParseError,
  MissingNorm,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonSquare: return "NonSquare";
    case ErrorKind::Asymmetric: return "Asymmetric";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::SingularBlock: return "SingularBlock";
    case ErrorKind::RouteMismatch: return "RouteMismatch";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::BadShape: return "BadShape";
    case ErrorKind::BadPartition: return "BadPartition";
    case ErrorKind::SingularTransform: return "SingularTransform";
    case ErrorKind::PairingFailure: return "PairingFailure";
    case ErrorKind::BadSpin: return "BadSpin";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::BadCutoff: return "BadCutoff";
    case ErrorKind::TruncationOverflow: return "TruncationOverflow";
    case ErrorKind::DegenerateSeries: return "DegenerateSeries";
    case ErrorKind::WindowTooSmall: return "WindowTooSmall";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::MissingNorm: return "MissingNorm";
  }
  return "Unknown";
}

/// Process exit codes used by the CLI.
namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int parse = 2;
inline constexpr int invalid_input = 3;
inline constexpr int finding = 4;
inline constexpr int numerical = 5;
}  // namespace exit_code

constexpr int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ParseError: return exit_code::parse;
    case ErrorKind::RouteMismatch:
    case ErrorKind::PairingFailure: return exit_code::numerical;
    default: return exit_code::invalid_input;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace chibounds
