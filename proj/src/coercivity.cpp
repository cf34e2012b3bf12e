#include "mrsla/coercivity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mrsla/errors.hpp"

namespace mrsla {

namespace {

constexpr double kBetaTolerance = 1e-9;
constexpr double kMinBetaBracket = 1e-6;

std::string point_label(std::size_t i) { return "point " + std::to_string(i); }

}  // namespace

SpectralState SpectralState::from_eigenvalues(double g1, double g2, double p0, const MaterialParams& params) {
  if (!(g1 > 0.0) || !(g2 > 0.0) || !std::isfinite(g1) || !std::isfinite(g2)) {
    throw Error(ErrorKind::InvalidStrain, "eigenvalues of B0 must be positive and finite");
  }
  SpectralState s;
  s.gamma1 = std::max(g1, g2);
  s.gamma2 = std::min(g1, g2);
  s.p0 = p0;
  s.detB0 = g1 * g2;
  s.trB0 = g1 + g2;
  s.trB0inv = s.trB0 / s.detB0;
  s.trT0 = -2.0 * p0 + params.s1() * s.trB0 + params.s2() * s.trB0inv;
  return s;
}

SpectralState spectral_of(const Tensor2& B0, double p0, const MaterialParams& params) {
  if (!is_finite(B0) || asymmetry(B0) > 1e-10) {
    throw Error(ErrorKind::InvalidStrain, "B0 must be a finite symmetric tensor");
  }
  const double a = B0(0, 0);
  const double c = B0(1, 1);
  const double b = 0.5 * (B0(0, 1) + B0(1, 0));
  const double d = a * c - b * b;
  if (!(a > 0.0) || !(d > 0.0)) {
    throw Error(ErrorKind::InvalidStrain, "B0 is not positive definite");
  }
  const double mean = 0.5 * (a + c);
  const double radius = std::hypot(0.5 * (a - c), b);
  SpectralState s;
  s.gamma1 = mean + radius;
  s.gamma2 = d / s.gamma1;
  s.p0 = p0;
  s.detB0 = d;
  s.trB0 = a + c;
  s.trB0inv = s.trB0 / d;
  s.trT0 = -2.0 * p0 + params.s1() * s.trB0 + params.s2() * s.trB0inv;
  return s;
}

double spectral_f(double gamma, const MaterialParams& params) { return params.s1() * gamma - params.s2() / gamma; }
double spectral_g(double gamma, const MaterialParams& params) { return params.s1() * gamma + params.s2() / gamma; }

Matrix4 CoercivityMatrix::dense() const {
  Matrix4 m{};
  m[0][0] = a11;
  m[1][1] = a22;
  m[0][1] = m[1][0] = a12;
  m[2][2] = a33;
  m[3][3] = a44;
  m[2][3] = m[3][2] = a34;
  return m;
}

CoercivityMatrix build_coercivity_matrix(const SpectralState& s, double beta, const MaterialParams& params) {
  const double s1 = params.s1();
  const double s2 = params.s2();
  CoercivityMatrix A;
  A.beta = beta;
  A.a11 = beta + 2.0 * spectral_f(s.gamma1, params);
  A.a22 = beta + 2.0 * spectral_f(s.gamma2, params);
  A.a12 = beta + 0.5 * s.trT0;
  A.a33 = 2.0 * s1 * s.trB0 - 2.0 * s2 * s.trB0inv - s.trT0;
  A.a44 = s.trT0;
  A.a34 = s1 * (s.gamma2 - s.gamma1) - s2 * (1.0 / s.gamma1 - 1.0 / s.gamma2);
  return A;
}

std::array<double, 4> sylvester_quantities(const CoercivityMatrix& A, double alpha) {
  const double d11 = A.a11 - alpha;
  const double d22 = A.a22 - alpha;
  const double d33 = A.a33 - alpha;
  const double d44 = A.a44 - alpha;
  return {d11, d11 * d22 - A.a12 * A.a12, d33, d33 * d44 - A.a34 * A.a34};
}

double sylvester_margin(const CoercivityMatrix& A, double alpha) {
  const auto q = sylvester_quantities(A, alpha);
  return std::min({q[0], q[1], q[2], q[3], A.a22 - alpha, A.a44 - alpha});
}

bool sylvester_psd(const CoercivityMatrix& A, double alpha) { return sylvester_margin(A, alpha) >= 0.0; }

double stretch_ratio(const SpectralState& s) { return s.trB0 / std::sqrt(s.detB0); }

GapRoots gap_roots(const SpectralState& s, double alpha, const MaterialParams& params) {
  const double s1 = params.s1();
  const double s2 = params.s2();
  const double C = spectral_f(std::sqrt(s.detB0), params);
  const double shift = -2.0 * s2 * s.trB0inv;
  const double disc = C * C - 0.5 * alpha * (s1 * s.trB0 - s2 * s.trB0inv) + 0.25 * alpha * alpha;
  if (disc < 0.0) {
    throw Error(ErrorKind::AlphaTooLarge,
                "alpha = " + std::to_string(alpha) +
                    " makes the second-block discriminant negative; alpha must satisfy the bound alpha*dbar < "
                    "2 sqrt(-s1 s2) (s2 < 0) or 2 eps sqrt(k) (s2 >= 0)");
  }
  const double root = std::sqrt(disc);
  GapRoots r;
  r.a_alpha = shift - 2.0 * root;
  r.b_alpha = shift + 2.0 * root;
  r.a0 = shift - 2.0 * C;
  r.b0 = shift + 2.0 * C;
  r.a_star = -s1 * s.trB0 - s2 * s.trB0inv;
  r.b_star = s1 * s.trB0 - 3.0 * s2 * s.trB0inv;
  return r;
}

double default_k(const MaterialParams& params) {
  if (params.s2() > 0.0) return std::max(1e-3, 1.01 * params.s2() / params.s1());
  return 1e-3;
}

double alpha_upper_bound(double dbar, double k, const MaterialParams& params) {
  const double s1 = params.s1();
  const double s2 = params.s2();
  const double bound = s2 < 0.0 ? 2.0 * std::sqrt(-s1 * s2) : 2.0 * (s1 - s2 / k) * std::sqrt(k);
  return bound / dbar;
}

const char* to_string(CertificationCheck check) {
  switch (check) {
    case CertificationCheck::DetLowerBound: return "det_lower_bound";
    case CertificationCheck::AlphaBound: return "alpha_bound";
    case CertificationCheck::GapCondition: return "gap_condition";
    case CertificationCheck::PressureBound: return "pressure_bound";
    case CertificationCheck::BetaSearch: return "beta_search";
  }
  return "unknown";
}

void CoercivityReport::require_admissible() const {
  if (admissible) return;
  if (failures.empty()) throw Error(ErrorKind::BetaExceedsMax, "no admissible beta0 found");
  const auto& f = failures.front();
  const ErrorKind kind =
      f.check == CertificationCheck::BetaSearch ? ErrorKind::BetaExceedsMax : ErrorKind::HypothesesViolated;
  throw Error(kind, std::string(to_string(f.check)) + ": " + f.message);
}

std::optional<double> minimal_beta(const SpectralState& s, double alpha, double beta_max,
                                   const MaterialParams& params) {
  auto psd = [&](double beta) { return sylvester_psd(build_coercivity_matrix(s, beta, params), alpha); };
  if (psd(0.0)) return 0.0;
  double lo = 0.0;
  double hi = std::min(std::max(alpha, kMinBetaBracket), beta_max);
  while (!psd(hi)) {
    if (hi >= beta_max) return std::nullopt;
    lo = hi;
    hi = std::min(2.0 * hi, beta_max);
  }
  while (hi - lo > kBetaTolerance) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (psd(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

double auto_alpha(std::span<const SpectralState> points, double k, const MaterialParams& params, double fraction) {
  if (points.empty()) throw Error(ErrorKind::InvalidArgument, "no sample points");
  double dbar = 0.0;
  for (const auto& s : points) dbar = std::max(dbar, stretch_ratio(s));
  return fraction * alpha_upper_bound(dbar, k, params);
}

CoercivityReport certify(std::span<const SpectralState> points, double alpha, double k, double beta_max,
                         const MaterialParams& params) {
  const double s1 = params.s1();
  const double s2 = params.s2();
  if (points.empty()) throw Error(ErrorKind::InvalidArgument, "certify needs at least one sample point");
  if (!(alpha > 0.0)) throw Error(ErrorKind::InvalidArgument, "alpha must be positive");
  if (!(k > std::max(0.0, s2 / s1))) {
    throw Error(ErrorKind::InvalidArgument, "k must exceed max(0, s2/s1)");
  }
  if (!(beta_max > 0.0)) throw Error(ErrorKind::InvalidArgument, "beta_max must be positive");

  CoercivityReport r;
  r.k = k;
  r.epsilon = s1 - s2 / k;
  r.alpha = alpha;
  r.beta_max = beta_max;
  for (const auto& s : points) r.dbar = std::max(r.dbar, stretch_ratio(s));
  r.alpha_max = alpha_upper_bound(r.dbar, k, params);

  if (!(alpha < r.alpha_max)) {
    r.failures.push_back({CertificationCheck::AlphaBound, std::nullopt,
                          "alpha = " + std::to_string(alpha) + " is not below alpha_max = " +
                              std::to_string(r.alpha_max) + " (dbar = " + std::to_string(r.dbar) + ")"});
  }

  const std::size_t n = points.size();
  r.gap_lo.resize(n);
  r.gap_hi.resize(n);
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = points[i];
    const double C = spectral_f(std::sqrt(s.detB0), params);
    const double shift = -2.0 * s2 * s.trB0inv;
    const double a0 = shift - 2.0 * C;
    const double b0 = shift + 2.0 * C;
    const double x = -2.0 * s.p0;
    r.gap_lo[i] = x - (a0 + alpha * r.dbar);
    r.gap_hi[i] = (b0 - alpha * r.dbar) - x;
    const double m = std::min(r.gap_lo[i], r.gap_hi[i]);
    if (m < worst) {
      worst = m;
      r.worst_point = i;
    }
    if (!(s.detB0 >= k)) {
      r.failures.push_back({CertificationCheck::DetLowerBound, i,
                            point_label(i) + ": det B0 = " + std::to_string(s.detB0) + " < k = " + std::to_string(k)});
    }
    if (!(r.gap_lo[i] > 0.0) || !(r.gap_hi[i] > 0.0)) {
      r.failures.push_back({CertificationCheck::GapCondition, i,
                            point_label(i) + ": -2p0 = " + std::to_string(x) + " outside (" +
                                std::to_string(a0 + alpha * r.dbar) + ", " + std::to_string(b0 - alpha * r.dbar) +
                                ")"});
    }
    const double b_star = s1 * s.trB0 - 3.0 * s2 * s.trB0inv;
    if (!(x < -2.0 * alpha + b_star)) {
      r.failures.push_back({CertificationCheck::PressureBound, i,
                            point_label(i) + ": -2p0 = " + std::to_string(x) + " not below " +
                                std::to_string(-2.0 * alpha + b_star)});
    }
  }

  double beta0 = 0.0;
  bool found = true;
  for (std::size_t i = 0; i < n; ++i) {
    const auto b = minimal_beta(points[i], alpha, beta_max, params);
    if (!b) {
      found = false;
      r.failures.push_back({CertificationCheck::BetaSearch, i,
                            point_label(i) + ": A - alpha I is not PSD for any beta <= " + std::to_string(beta_max)});
      continue;
    }
    beta0 = std::max(beta0, *b);
  }
  if (found) r.beta0 = beta0;
  r.admissible = r.failures.empty() && r.beta0.has_value();
  return r;
}

}  // namespace mrsla
