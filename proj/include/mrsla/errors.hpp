#pragma once

#include <stdexcept>
#include <string>

namespace mrsla {

enum class ErrorKind {
  InvalidArgument,
  InvalidMaterial,
  SingularStrain,
  InvalidStrain,
  StepTooLarge,
  AlphaTooLarge,
  HypothesesViolated,
  BetaExceedsMax,
  MeshParse,
  MeshValidation,
  DegenerateEdge,
  CornerConflict,
  InconsistentState,
  SolverStagnation,
  Config,
  Io,
  InternalInconsistency,
};

const char* to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` drives CLI exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace mrsla
