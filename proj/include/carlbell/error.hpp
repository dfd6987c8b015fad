#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace carlbell {

enum class ErrorKind {
  DegeneratePoint,
  DomainError,
  PoleError,
  NoNegativeRoot,
  Nonconvergence,
  BoundaryGradient,
  NotSuperharmonic,
  DepthTooSmall,
  NoRealRoot,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DegeneratePoint: return "DegeneratePoint";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::PoleError: return "PoleError";
    case ErrorKind::NoNegativeRoot: return "NoNegativeRoot";
    case ErrorKind::Nonconvergence: return "Nonconvergence";
    case ErrorKind::BoundaryGradient: return "BoundaryGradient";
    case ErrorKind::NotSuperharmonic: return "NotSuperharmonic";
    case ErrorKind::DepthTooSmall: return "DepthTooSmall";
    case ErrorKind::NoRealRoot: return "NoRealRoot";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the kinds above so
/// callers (the CLI in particular) can map it to an exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace carlbell
