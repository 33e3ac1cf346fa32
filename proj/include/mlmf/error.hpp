#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mlmf {

/// Failure kinds raised by the library. Each kind belongs to one ErrorClass,
/// which the command-line front-end maps onto a process exit code.
enum class ErrorCode {
  // configuration
  BadConfig,
  // ingestion / data model
  UnknownSample,
  DuplicateSample,
  OrphanedSample,
  UnknownView,
  DegenerateShape,
  NonFiniteInput,
  ParseError,
  MissingFile,
  // solvers
  RankTooLarge,
  NonDecreasingLayers,
  ShapeMismatch,
  SingularNormalMatrix,
  NonFiniteGradient,
  IsolatedVertex,
  EigensolveFailure,
  EmptyClusterUnrecoverable,
  // evaluation
  SingleGroup,
  NoEvents,
  LengthMismatch,
};

enum class ErrorClass { Config = 2, Ingestion = 3, Solver = 4, Evaluation = 5 };

std::string_view to_string(ErrorCode code) noexcept;
ErrorClass error_class(ErrorCode code) noexcept;
std::string_view to_string(ErrorClass cls) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  ErrorClass error_class() const noexcept { return mlmf::error_class(code_); }

 private:
  ErrorCode code_;
};

[[noreturn]] void raise(ErrorCode code, const std::string& message);

}  // namespace mlmf
