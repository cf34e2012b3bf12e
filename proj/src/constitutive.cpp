#include "mrsla/constitutive.hpp"

#include <string>

#include "mrsla/errors.hpp"

namespace mrsla {

namespace {

constexpr double kSingularDet = 1e-14;
constexpr double kMinStepDet = 1e-8;

}  // namespace

MaterialParams::MaterialParams(double s1, double s2, double beta, double rho0, Vec2 gravity)
    : s1_(s1), s2_(s2), beta_(beta), rho0_(rho0), gravity_(gravity) {
  if (!std::isfinite(s1) || !std::isfinite(s2) || !(s1 > 0.0) || !(s2 < s1)) {
    throw Error(ErrorKind::InvalidMaterial, "material constants must satisfy s1 > 0 and s2 < s1 (got s1 = " +
                                                std::to_string(s1) + ", s2 = " + std::to_string(s2) + ")");
  }
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw Error(ErrorKind::InvalidMaterial, "beta must be positive (got " + std::to_string(beta) + ")");
  }
  if (!(rho0 > 0.0) || !std::isfinite(rho0)) {
    throw Error(ErrorKind::InvalidMaterial, "rho0 must be positive (got " + std::to_string(rho0) + ")");
  }
  if (!std::isfinite(gravity.x) || !std::isfinite(gravity.y)) {
    throw Error(ErrorKind::InvalidMaterial, "gravity must be finite");
  }
}

QuadPointState QuadPointState::from_deformation(const Tensor2& F, double p, const MaterialParams& params) {
  const double J = det(F);
  if (!(J > 0.0)) throw Error(ErrorKind::InvalidStrain, "deformation gradient must have positive determinant");
  QuadPointState s;
  s.F = F;
  s.B0 = F * transpose(F);
  s.p0 = p;
  s.T0 = cauchy_stress(s.B0, p, params);
  s.rho = params.rho0() / J;
  return s;
}

Tensor2 cauchy_stress(const Tensor2& B, double p, const MaterialParams& params) {
  const Tensor2 Binv = inverse(B, kSingularDet);
  return -p * Tensor2::identity() + params.s1() * B + params.s2() * Binv;
}

Tensor2 elastic_differential(const Tensor2& H, const Tensor2& B, const MaterialParams& params) {
  const Tensor2 Binv = inverse(B, kSingularDet);
  const Tensor2 Ht = transpose(H);
  return params.s1() * (H * B + B * Ht) - params.s2() * (Binv * H + Ht * Binv);
}

Tensor2 elasticity_increment(const Tensor2& H, const Tensor2& B, double beta, const MaterialParams& params) {
  return (beta * trace(H)) * Tensor2::identity() + elastic_differential(H, B, params);
}

Tensor2 tangent(const Tensor2& H, const Tensor2& B0, const Tensor2& T0, double beta, const MaterialParams& params) {
  return trace(H) * (T0 + beta * Tensor2::identity()) - T0 * transpose(H) + elastic_differential(H, B0, params);
}

Tensor2 linearized_piola_kirchhoff(const Tensor2& T0, const Tensor2& H, const Tensor2& B0, double beta,
                                   const MaterialParams& params) {
  return T0 + tangent(H, B0, T0, beta, params);
}

QuadPointState update_state(const QuadPointState& state, const Tensor2& H, double beta,
                            const MaterialParams& params) {
  const Tensor2 step = Tensor2::identity() + H;
  const double J = det(step);
  if (!(J > kMinStepDet)) {
    throw Error(ErrorKind::StepTooLarge,
                "det(I+H) = " + std::to_string(J) + " is not safely positive; increase the number of steps");
  }
  const double trH = trace(H);
  QuadPointState next;
  next.F = step * state.F;
  next.B0 = next.F * transpose(next.F);
  next.T0 = state.T0 + elasticity_increment(H, state.B0, beta, params);
  next.p0 = state.p0 - beta * trH;
  next.rho = state.rho * (1.0 - trH);
  return next;
}

double density_drift(const QuadPointState& state, const MaterialParams& params) {
  return std::abs(state.rho * det(state.F) - params.rho0()) / params.rho0();
}

}  // namespace mrsla
