#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cutplate {

enum class ErrorCode {
  AmbiguousCut,
  NoConvergence,
  DegenerateTriangle,
  NotPositiveDefinite,
  SingularSystem,
  ConfigError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Failures of the cut geometry: bad intersections, degenerate cut cells.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Failures of the linear algebra: factorization breakdown, stalled iterations.
class SolverError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorCode::ConfigError, what) {}
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::AmbiguousCut: return "AmbiguousCut";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::DegenerateTriangle: return "DegenerateTriangle";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace cutplate
