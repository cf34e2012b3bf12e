#pragma once

// Pointwise coercivity certification of the linearized step operator.
//
// At a point with B0 diagonalized as diag(gamma1, gamma2), the quadratic form
// tr(K[H] H^T) equals X^T A X with X = (a, c, b, d) for H = [[a, b+d], [b-d, c]].
// A is block diagonal (two 2x2 blocks); A - alpha I >= 0 everywhere gives
// L(u,u) >= alpha/2 ||u||^2 over the admissible displacement space.

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mrsla/constitutive.hpp"

namespace mrsla {

/// Eigen-decomposed left Cauchy-Green tensor at one point plus the invariants the
/// certification needs.
struct SpectralState {
  double gamma1 = 1.0;  ///< larger eigenvalue of B0
  double gamma2 = 1.0;  ///< smaller eigenvalue of B0
  double p0 = 0.0;
  double detB0 = 1.0;
  double trB0 = 2.0;
  double trB0inv = 2.0;
  double trT0 = 0.0;  ///< -2 p0 + s1 trB0 + s2 trB0inv

  /// Diagonal B0 = diag(g1, g2); the eigenvalues are sorted.
  static SpectralState from_eigenvalues(double g1, double g2, double p0, const MaterialParams& params);
};

/// Closed-form eigendecomposition of a symmetric positive definite 2x2 B0.
/// Throws InvalidStrain when B0 is not SPD (or visibly non-symmetric).
SpectralState spectral_of(const Tensor2& B0, double p0, const MaterialParams& params);

/// f(g) = s1 g - s2/g
double spectral_f(double gamma, const MaterialParams& params);
/// g(g) = s1 g + s2/g
double spectral_g(double gamma, const MaterialParams& params);

using Matrix4 = std::array<std::array<double, 4>, 4>;

/// The six independent entries of the block-diagonal symmetric 4x4 matrix.
struct CoercivityMatrix {
  double a11 = 0.0;
  double a22 = 0.0;
  double a12 = 0.0;
  double a33 = 0.0;
  double a44 = 0.0;
  double a34 = 0.0;
  double beta = 0.0;

  Matrix4 dense() const;
};

CoercivityMatrix build_coercivity_matrix(const SpectralState& s, double beta, const MaterialParams& params);

/// The four block quantities whose non-negativity decides whether A - alpha I is PSD:
/// {A11-a, (A11-a)(A22-a)-A12^2, A33-a, (A33-a)(A44-a)-A34^2}.
std::array<double, 4> sylvester_quantities(const CoercivityMatrix& A, double alpha);

/// A - alpha I positive semidefinite by the block minor test. Exact zeros count as PSD.
/// The trailing diagonal entries A22-alpha and A44-alpha are checked as well so that the
/// degenerate case A11 = alpha with a negative trailing entry is rejected.
bool sylvester_psd(const CoercivityMatrix& A, double alpha);

/// Smallest of the (up to six) Sylvester quantities; >= 0 iff sylvester_psd.
double sylvester_margin(const CoercivityMatrix& A, double alpha);

struct GapRoots {
  double a_alpha = 0.0;
  double b_alpha = 0.0;
  double a0 = 0.0;
  double b0 = 0.0;
  double a_star = 0.0;
  double b_star = 0.0;
};

/// Interval end points for -2 p0. a_alpha/b_alpha bound the second-block condition exactly;
/// a0/b0 are the alpha-free bounds, a_star/b_star the first/second-block compatibility bounds.
/// Throws AlphaTooLarge when the discriminant is negative.
GapRoots gap_roots(const SpectralState& s, double alpha, const MaterialParams& params);

/// Ratio trB0 / sqrt(det B0); >= 2 for SPD B0.
double stretch_ratio(const SpectralState& s);

/// Default k: max(1e-3, 1.01 s2/s1) for s2 > 0, else 1e-3.
double default_k(const MaterialParams& params);

/// Largest alpha allowed by the bound alpha * dbar < 2 sqrt(-s1 s2) (s2 < 0) or 2 eps sqrt(k).
double alpha_upper_bound(double dbar, double k, const MaterialParams& params);

enum class CertificationCheck {
  DetLowerBound,   ///< det B0 >= k
  AlphaBound,      ///< alpha dbar < 2 sqrt(-s1 s2) or 2 eps sqrt(k)
  GapCondition,    ///< a0 + alpha dbar < -2 p0 < b0 - alpha dbar
  PressureBound,   ///< -2 p0 < -2 alpha + s1 trB0 - 3 s2 trB0inv
  BetaSearch,      ///< A - alpha I reached PSD for some beta <= beta_max
};

const char* to_string(CertificationCheck check);

struct CertificationFailure {
  CertificationCheck check;
  std::optional<std::size_t> point;
  std::string message;
};

struct CoercivityReport {
  double k = 0.0;
  double epsilon = 0.0;  ///< s1 - s2/k
  double dbar = 0.0;     ///< max over points of trB0/sqrt(det B0)
  double alpha = 0.0;
  double alpha_max = 0.0;
  double beta_max = 0.0;
  std::vector<double> gap_lo;  ///< -2p0 - (a0 + alpha dbar) per point
  std::vector<double> gap_hi;  ///< (b0 - alpha dbar) - (-2p0) per point
  std::optional<double> beta0;
  bool admissible = false;
  std::size_t worst_point = 0;
  std::vector<CertificationFailure> failures;

  /// Throws HypothesesViolated or BetaExceedsMax naming the first failure.
  void require_admissible() const;
  /// Whether a run at this beta is covered by the certificate.
  bool covers(double beta) const { return admissible && beta0 && beta >= *beta0; }
};

/// Smallest beta in [0, beta_max] with A - alpha I PSD at this point, by upward doubling from
/// max(alpha, 1e-6) then bisection to 1e-9. Empty when beta_max is not enough.
std::optional<double> minimal_beta(const SpectralState& s, double alpha, double beta_max,
                                   const MaterialParams& params);

/// Checks the well-posedness hypotheses over the sample points and computes beta0.
/// Never throws on failed hypotheses; failures are listed in the report.
CoercivityReport certify(std::span<const SpectralState> points, double alpha, double k, double beta_max,
                         const MaterialParams& params);

/// alpha = fraction * alpha_max for the given points.
double auto_alpha(std::span<const SpectralState> points, double k, const MaterialParams& params,
                  double fraction = 0.9);

}  // namespace mrsla
