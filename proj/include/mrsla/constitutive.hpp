#pragma once

// Mooney-Rivlin law T = -pI + s1 B + s2 B^{-1} and its linearization about the
// current configuration, used by every successive-linear-approximation step.

#include "mrsla/tensor2.hpp"

namespace mrsla {

/// Material constants. Construction enforces s1 > 0, s2 < s1, beta > 0, rho0 > 0.
class MaterialParams {
 public:
  MaterialParams(double s1, double s2, double beta, double rho0, Vec2 gravity = {});

  double s1() const { return s1_; }
  double s2() const { return s2_; }
  double beta() const { return beta_; }
  double rho0() const { return rho0_; }
  Vec2 gravity() const { return gravity_; }

  /// True for the classical sign regime s2 <= 0 < s1.
  bool classical_regime() const { return s2_ <= 0.0; }

  MaterialParams with_beta(double beta) const { return {s1_, s2_, beta, rho0_, gravity_}; }

 private:
  double s1_;
  double s2_;
  double beta_;
  double rho0_;
  Vec2 gravity_;
};

/// Mechanical state carried at one quadrature point (one per P1 element).
struct QuadPointState {
  Tensor2 F = Tensor2::identity();   ///< deformation gradient w.r.t. the preferred configuration
  Tensor2 B0 = Tensor2::identity();  ///< left Cauchy-Green tensor F F^T
  Tensor2 T0;                        ///< Cauchy stress
  double p0 = 0.0;                   ///< pressure
  double rho = 0.0;                  ///< mass density

  /// State at a homogeneous deformation F with pressure p; T0 from the constitutive law and
  /// rho = rho0 / det F.
  static QuadPointState from_deformation(const Tensor2& F, double p, const MaterialParams& params);

  /// Undeformed start (F = I) with pressure p.
  static QuadPointState initial(double p, const MaterialParams& params) {
    return from_deformation(Tensor2::identity(), p, params);
  }
};

/// T = -pI + s1 B + s2 B^{-1}.
Tensor2 cauchy_stress(const Tensor2& B, double p, const MaterialParams& params);

/// Frechet differential of B -> s1 B + s2 B^{-1} along H, expressed relative to the current
/// configuration: s1 (HB + BH^T) - s2 (B^{-1}H + H^T B^{-1}).
Tensor2 elastic_differential(const Tensor2& H, const Tensor2& B, const MaterialParams& params);

/// Current-configuration elasticity L(F)[H] = beta tr(H) I + elastic_differential(H, B).
Tensor2 elasticity_increment(const Tensor2& H, const Tensor2& B, double beta, const MaterialParams& params);

/// Linearized stress operator of one step:
/// K[H] = tr(H)(T0 + beta I) - T0 H^T + s1(H B0 + B0 H^T) - s2(B0^{-1} H + H^T B0^{-1}).
Tensor2 tangent(const Tensor2& H, const Tensor2& B0, const Tensor2& T0, double beta, const MaterialParams& params);

/// First Piola-Kirchhoff stress relative to the current configuration, to first order in H.
/// Equals T0 + tangent(H, ...).
Tensor2 linearized_piola_kirchhoff(const Tensor2& T0, const Tensor2& H, const Tensor2& B0, double beta,
                                   const MaterialParams& params);

/// Advances one quadrature point by the relative displacement gradient H:
/// F+ = (I+H)F, B0+ = F+ F+^T, T0+ = T0 + L(F)[H], p+ = p - beta tr H, rho+ = rho (1 - tr H).
/// Throws StepTooLarge when det(I+H) <= 1e-8.
QuadPointState update_state(const QuadPointState& state, const Tensor2& H, double beta,
                            const MaterialParams& params);

/// |rho det F - rho0| / rho0, the accumulated drift of the linearized density law.
double density_drift(const QuadPointState& state, const MaterialParams& params);

}  // namespace mrsla
