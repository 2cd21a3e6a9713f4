#pragma once

#include <stdexcept>
#include <string>

namespace congeo {

enum class ErrorCode {
  AsymmetricInput,
  NegativeWeight,
  IllConditioned,
  ZeroWeight,
  SingletonClass,
  BadEpsilon,
  ZeroLabelVector,
  NotPSD,
  SizeMismatch,
  ZeroVector,
  NotEDM,
  NotSphericalEDM,
  RadiusTooLarge,
  DimensionTooSmall,
  TemperatureOrder,
  InfeasibleBeta,
  DuplicatePrototypes,
  NonConvergence,
  DegenerateTarget,
  NonFinite,
  BadConfig,
  IoError,
  InvalidArgument,
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::AsymmetricInput: return "AsymmetricInput";
    case ErrorCode::NegativeWeight: return "NegativeWeight";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::ZeroWeight: return "ZeroWeight";
    case ErrorCode::SingletonClass: return "SingletonClass";
    case ErrorCode::BadEpsilon: return "BadEpsilon";
    case ErrorCode::ZeroLabelVector: return "ZeroLabelVector";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::NotEDM: return "NotEDM";
    case ErrorCode::NotSphericalEDM: return "NotSphericalEDM";
    case ErrorCode::RadiusTooLarge: return "RadiusTooLarge";
    case ErrorCode::DimensionTooSmall: return "DimensionTooSmall";
    case ErrorCode::TemperatureOrder: return "TemperatureOrder";
    case ErrorCode::InfeasibleBeta: return "InfeasibleBeta";
    case ErrorCode::DuplicatePrototypes: return "DuplicatePrototypes";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::DegenerateTarget: return "DegenerateTarget";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::BadConfig: return "BadConfig";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace congeo
