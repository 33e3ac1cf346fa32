#include "mlmf/error.hpp"

namespace mlmf {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::BadConfig: return "BadConfig";
    case ErrorCode::UnknownSample: return "UnknownSample";
    case ErrorCode::DuplicateSample: return "DuplicateSample";
    case ErrorCode::OrphanedSample: return "OrphanedSample";
    case ErrorCode::UnknownView: return "UnknownView";
    case ErrorCode::DegenerateShape: return "DegenerateShape";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::RankTooLarge: return "RankTooLarge";
    case ErrorCode::NonDecreasingLayers: return "NonDecreasingLayers";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::SingularNormalMatrix: return "SingularNormalMatrix";
    case ErrorCode::NonFiniteGradient: return "NonFiniteGradient";
    case ErrorCode::IsolatedVertex: return "IsolatedVertex";
    case ErrorCode::EigensolveFailure: return "EigensolveFailure";
    case ErrorCode::EmptyClusterUnrecoverable: return "EmptyClusterUnrecoverable";
    case ErrorCode::SingleGroup: return "SingleGroup";
    case ErrorCode::NoEvents: return "NoEvents";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
  }
  return "Unknown";
}

ErrorClass error_class(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::BadConfig:
      return ErrorClass::Config;
    case ErrorCode::UnknownSample:
    case ErrorCode::DuplicateSample:
    case ErrorCode::OrphanedSample:
    case ErrorCode::UnknownView:
    case ErrorCode::DegenerateShape:
    case ErrorCode::NonFiniteInput:
    case ErrorCode::ParseError:
    case ErrorCode::MissingFile:
      return ErrorClass::Ingestion;
    case ErrorCode::SingleGroup:
    case ErrorCode::NoEvents:
    case ErrorCode::LengthMismatch:
      return ErrorClass::Evaluation;
    default:
      return ErrorClass::Solver;
  }
}

std::string_view to_string(ErrorClass cls) noexcept {
  switch (cls) {
    case ErrorClass::Config: return "config";
    case ErrorClass::Ingestion: return "ingestion";
    case ErrorClass::Solver: return "solver";
    case ErrorClass::Evaluation: return "evaluation";
  }
  return "unknown";
}

void raise(ErrorCode code, const std::string& message) {
  throw Error(code, std::string(to_string(code)) + ": " + message);
}

}  // namespace mlmf
