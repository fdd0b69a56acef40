#pragma once

#include <stdexcept>
#include <string>

namespace facimean {

enum class ErrorCode {
  TooFewObservations,
  DegenerateSample,
  DegenerateWeights,
  DegenerateWeightedCenter,
  ZeroTimeIndex,
  DomainError,
  UnsupportedDesign,
  ConfigError,
  IoError,
  InvalidArgument,
};

inline const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::TooFewObservations: return "TooFewObservations";
    case ErrorCode::DegenerateSample: return "DegenerateSample";
    case ErrorCode::DegenerateWeights: return "DegenerateWeights";
    case ErrorCode::DegenerateWeightedCenter: return "DegenerateWeightedCenter";
    case ErrorCode::ZeroTimeIndex: return "ZeroTimeIndex";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::UnsupportedDesign: return "UnsupportedDesign";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace facimean
