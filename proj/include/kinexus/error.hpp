#pragma once

#include <stdexcept>
#include <string>

namespace kinexus {

enum class Errc {
  InvalidMesh,
  DimensionMismatch,
  NonFiniteInput,
  PositivityViolation,
  MonotonicityViolation,
  MeshMismatch,
  ControlInconsistent,
  InvalidTech,
  InvalidParam,
  OracleDomain,
  NegativeDensity,
  ConfigError,
  ResidualTooLarge,
  NoTail,
  NotConverged,
  EmptyWindow,
  DegenerateTail,
  NonPositiveY,
  IoError,
};

inline const char* to_string(Errc c) {
  switch (c) {
    case Errc::InvalidMesh: return "InvalidMesh";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::NonFiniteInput: return "NonFiniteInput";
    case Errc::PositivityViolation: return "PositivityViolation";
    case Errc::MonotonicityViolation: return "MonotonicityViolation";
    case Errc::MeshMismatch: return "MeshMismatch";
    case Errc::ControlInconsistent: return "ControlInconsistent";
    case Errc::InvalidTech: return "InvalidTech";
    case Errc::InvalidParam: return "InvalidParam";
    case Errc::OracleDomain: return "OracleDomain";
    case Errc::NegativeDensity: return "NegativeDensity";
    case Errc::ConfigError: return "ConfigError";
    case Errc::ResidualTooLarge: return "ResidualTooLarge";
    case Errc::NoTail: return "NoTail";
    case Errc::NotConverged: return "NotConverged";
    case Errc::EmptyWindow: return "EmptyWindow";
    case Errc::DegenerateTail: return "DegenerateTail";
    case Errc::NonPositiveY: return "NonPositiveY";
    case Errc::IoError: return "IoError";
  }
  return "UnknownError";
}

/// All library failures are thrown as Error; the CLI maps codes to exit
/// statuses (config -> 2, non-convergence -> 3, numerical -> 4).
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool ok, Errc code, const std::string& what) {
  if (!ok) fail(code, what);
}

}  // namespace kinexus
