#include "mrsla/tensor2.hpp"

#include "mrsla/errors.hpp"

namespace mrsla {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::InvalidMaterial: return "invalid-material";
    case ErrorKind::SingularStrain: return "singular-strain";
    case ErrorKind::InvalidStrain: return "invalid-strain";
    case ErrorKind::StepTooLarge: return "step-too-large";
    case ErrorKind::AlphaTooLarge: return "alpha-too-large";
    case ErrorKind::HypothesesViolated: return "hypotheses-violated";
    case ErrorKind::BetaExceedsMax: return "beta-exceeds-max";
    case ErrorKind::MeshParse: return "mesh-parse";
    case ErrorKind::MeshValidation: return "mesh-validation";
    case ErrorKind::DegenerateEdge: return "degenerate-edge";
    case ErrorKind::CornerConflict: return "corner-conflict";
    case ErrorKind::InconsistentState: return "inconsistent-state";
    case ErrorKind::SolverStagnation: return "solver-stagnation";
    case ErrorKind::Config: return "config";
    case ErrorKind::Io: return "io";
    case ErrorKind::InternalInconsistency: return "internal-inconsistency";
  }
  return "unknown";
}

Tensor2 inverse(const Tensor2& x, double singular_threshold) {
  const double d = det(x);
  if (!(std::abs(d) >= singular_threshold)) {
    throw Error(ErrorKind::SingularStrain, "tensor is singular (|det| = " + std::to_string(std::abs(d)) + ")");
  }
  const double inv = 1.0 / d;
  return {x(1, 1) * inv, -x(0, 1) * inv, -x(1, 0) * inv, x(0, 0) * inv};
}

}  // namespace mrsla
