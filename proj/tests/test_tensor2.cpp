#include <gtest/gtest.h>

#include "mrsla/errors.hpp"
#include "mrsla/tensor2.hpp"
#include "support.hpp"

using namespace mrsla;

TEST(Tensor2, ProductsAndTranspose) {
  const Tensor2 A{1, 2, 3, 4};
  const Tensor2 B{0, 1, -1, 2};
  EXPECT_EQ(A * B, (Tensor2{-2, 5, -4, 11}));
  EXPECT_EQ(transpose(A), (Tensor2{1, 3, 2, 4}));
  EXPECT_DOUBLE_EQ(trace(A), 5.0);
  EXPECT_DOUBLE_EQ(det(A), -2.0);
  EXPECT_DOUBLE_EQ(ddot(A, B), 0 + 2 - 3 + 8);
  const Vec2 v = A * Vec2{1, 1};
  EXPECT_DOUBLE_EQ(v.x, 3.0);
  EXPECT_DOUBLE_EQ(v.y, 7.0);
}

TEST(Tensor2, OuterProduct) {
  const Tensor2 o = Tensor2::outer({1, 2}, {3, 4});
  EXPECT_EQ(o, (Tensor2{3, 4, 6, 8}));
}

TEST(Tensor2, InverseRoundTrip) {
  Sampler rng(7);
  for (int i = 0; i < 200; ++i) {
    const Tensor2 F = support::random_deformation(rng);
    EXPECT_LT(support::rel_err(F * inverse(F), Tensor2::identity()), 1e-14);
  }
}

TEST(Tensor2, SingularInverseThrows) {
  try {
    (void)inverse(Tensor2{1, 2, 2, 4});
    FAIL() << "expected an exception";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SingularStrain);
  }
}

TEST(Tensor2, SymSkewSplit) {
  const Tensor2 H{1, 2, -3, 4};
  EXPECT_EQ(sym(H) + skew(H), H);
  EXPECT_DOUBLE_EQ(asymmetry(sym(H)), 0.0);
}
