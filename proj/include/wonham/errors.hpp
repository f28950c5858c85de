#pragma once

#include <stdexcept>
#include <string>

namespace wonham {

enum class ErrorCode {
  NonErgodic,
  InsufficientHorizon,
  DegenerateWedge,
  DegenerateRun,
  DegenerateObservation,
  DomainError,
  NotApplicable,
  ConfigError,
};

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const { return code_; }

private:
  ErrorCode code_;
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::NonErgodic: return "NonErgodic";
    case ErrorCode::InsufficientHorizon: return "InsufficientHorizon";
    case ErrorCode::DegenerateWedge: return "DegenerateWedge";
    case ErrorCode::DegenerateRun: return "DegenerateRun";
    case ErrorCode::DegenerateObservation: return "DegenerateObservation";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::NotApplicable: return "NotApplicable";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace wonham
