#pragma once

#include <cmath>

#include "mrsla/verify.hpp"

namespace mrsla::support {

/// Random deformation gradient with det F in [0.5, 2].
inline Tensor2 random_deformation(Sampler& rng) {
  for (;;) {
    const Tensor2 F = Tensor2::identity() + rng.tensor(0.6);
    const double J = det(F);
    if (J >= 0.5 && J <= 2.0) return F;
  }
}

inline Tensor2 random_spd(Sampler& rng) {
  const Tensor2 F = random_deformation(rng);
  return F * transpose(F);
}

inline double rel_err(const Tensor2& a, const Tensor2& b) {
  const double scale = std::max(frobenius(a), frobenius(b));
  return scale > 0.0 ? frobenius(a - b) / scale : 0.0;
}

}  // namespace mrsla::support
