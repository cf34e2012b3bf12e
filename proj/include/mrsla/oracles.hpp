#pragma once

// Independent reference computations. Nothing here goes through the assembly or the
// coercivity matrix builder except where a function's purpose is to compare against them.

#include <span>

#include "mrsla/coercivity.hpp"
#include "mrsla/constitutive.hpp"
#include "mrsla/mesh.hpp"

namespace mrsla::oracles {

/// Homogeneous simple shear F = [[1, kappa], [0, 1]] of a Mooney-Rivlin solid.
struct ShearSolution {
  double kappa = 0.0;
  Tensor2 F;
  Tensor2 B;
  Tensor2 Binv;
  double T12 = 0.0;     ///< (s1 - s2) kappa
  double p_free = 0.0;  ///< pressure with T22 = 0
};

ShearSolution pure_shear(double kappa, const MaterialParams& params);

/// tr(K[H] H^T) at a point with B0 = diag(gamma1, gamma2) and T0 = -p0 I + s1 B0 + s2 B0^{-1},
/// evaluated directly from the trace expression.
double quadform_trace(const Tensor2& H, double gamma1, double gamma2, double p0, double beta,
                      const MaterialParams& params);

/// Same quantity from the symmetric/skew split H = E + R, summing the four block terms.
double quadform_blocks(const Tensor2& H, double gamma1, double gamma2, double p0, double beta,
                       const MaterialParams& params);

/// Relative difference |x - y| / scale with scale = max(|x|, |y|, floor).
double relative_difference(double x, double y, double floor = 0.0);

/// Evaluates both routes, throws InternalInconsistency when they differ by more than
/// `tolerance` relative to the magnitude of the individual terms, and returns the trace value.
double quadform_trace_oracle(const Tensor2& H, double gamma1, double gamma2, double p0, double beta,
                             const MaterialParams& params, double tolerance = 1e-12);

/// Sum of absolute values of the terms in the trace expression; the natural scale for
/// rounding error in the quadratic form.
double quadform_scale(const Tensor2& H, double gamma1, double gamma2, double p0, double beta,
                      const MaterialParams& params);

/// Symmetric 4x4 matrix of the quadratic form in X = (a, c, b, d), recovered by polarization
/// of quadform_trace. Independent of build_coercivity_matrix.
Matrix4 quadform_matrix(double gamma1, double gamma2, double p0, double beta, const MaterialParams& params);

/// Eigenvalues of a symmetric 4x4 by cyclic Jacobi rotations (off-diagonal norm <= 1e-14
/// relative to the Frobenius norm).
std::array<double, 4> jacobi_eigenvalues(Matrix4 m);

/// min eigenvalue of A - alpha I >= -tie_tolerance.
bool psd_eigen(const CoercivityMatrix& A, double alpha, double tie_tolerance = 1e-10);
double min_eigenvalue(const CoercivityMatrix& A, double alpha);

/// Uniaxial traction patch: B0 = I, T0 = 0, traction (t, 0) on the right edge, free top,
/// slip on the left (ux = 0) and bottom (uy = 0). Returns the homogeneous gradient H from
/// K[H] e1 = (t, 0), K[H] e2 = 0 and H12 = 0, by Gaussian elimination on the 4x4 system.
Tensor2 patch_gradient(double traction, double beta, const MaterialParams& params);

/// Sum over traction edges of the edge length times |T n - f|^2 with T = T0 + K[grad u]
/// constant on the owning element.
double traction_residual(const Mesh& mesh, std::span<const QuadPointState> states, std::span<const Vec2> u,
                         std::span<const Vec2> tractions, double beta, const MaterialParams& params);

}  // namespace mrsla::oracles
