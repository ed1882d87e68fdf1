#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ggl {

enum class ErrorCode {
  InvalidArgument,
  ZeroInGenerators,
  NotSymmetric,
  NotGenerating,
  NonFiniteEnergy,
  EllipticityViolation,
  QuadratureFailure,
  MethodUnsupported,
  DivergedChain,
  RegionTooLarge,
  TooFewSamples,
  SolverFailure,
  TolInfeasible,
  MarginTooSmall,
  DivergedEnvironment,
  DegenerateW,
  SupportOutsideRegion,
  BudgetExceeded,
  NoEmbeddingExists,
  NotAdapted,
  NotFStar,
  ConfigError,
  CheckpointVersionMismatch,
  CorruptCheckpoint,
  IoError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ZeroInGenerators: return "ZeroInGenerators";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::NotGenerating: return "NotGenerating";
    case ErrorCode::NonFiniteEnergy: return "NonFiniteEnergy";
    case ErrorCode::EllipticityViolation: return "EllipticityViolation";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::MethodUnsupported: return "MethodUnsupported";
    case ErrorCode::DivergedChain: return "DivergedChain";
    case ErrorCode::RegionTooLarge: return "RegionTooLarge";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::SolverFailure: return "SolverFailure";
    case ErrorCode::TolInfeasible: return "TolInfeasible";
    case ErrorCode::MarginTooSmall: return "MarginTooSmall";
    case ErrorCode::DivergedEnvironment: return "DivergedEnvironment";
    case ErrorCode::DegenerateW: return "DegenerateW";
    case ErrorCode::SupportOutsideRegion: return "SupportOutsideRegion";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::NoEmbeddingExists: return "NoEmbeddingExists";
    case ErrorCode::NotAdapted: return "NotAdapted";
    case ErrorCode::NotFStar: return "NotFStar";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::CheckpointVersionMismatch: return "CheckpointVersionMismatch";
    case ErrorCode::CorruptCheckpoint: return "CorruptCheckpoint";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace ggl
