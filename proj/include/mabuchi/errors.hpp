#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mabuchi {

enum class ErrorKind {
  NotDelzant,
  Unbounded,
  GridMismatch,
  NotAdmissible,
  TruncationTooSmall,
  PolytopeMismatch,
  SingularGram,
  NewtonDivergence,
  NonConvexIterate,
  NonMonotoneTrace,
  InvalidArgument,
  Config,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotDelzant: return "NotDelzant";
    case ErrorKind::Unbounded: return "Unbounded";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::NotAdmissible: return "NotAdmissible";
    case ErrorKind::TruncationTooSmall: return "TruncationTooSmall";
    case ErrorKind::PolytopeMismatch: return "PolytopeMismatch";
    case ErrorKind::SingularGram: return "SingularGram";
    case ErrorKind::NewtonDivergence: return "NewtonDivergence";
    case ErrorKind::NonConvexIterate: return "NonConvexIterate";
    case ErrorKind::NonMonotoneTrace: return "NonMonotoneTrace";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Config: return "ConfigError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the kinds above so
/// callers (and the CLI exit-code mapping) can branch without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace mabuchi
