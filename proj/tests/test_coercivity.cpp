#include <gtest/gtest.h>

#include <cmath>

#include "mrsla/coercivity.hpp"
#include "mrsla/errors.hpp"
#include "mrsla/oracles.hpp"
#include "support.hpp"

using namespace mrsla;

namespace {

const MaterialParams neo(1.0, 0.0, 10.0, 1.0);

SpectralState point(double g1, double g2, double p0, const MaterialParams& m = neo) {
  return SpectralState::from_eigenvalues(g1, g2, p0, m);
}

}  // namespace

TEST(Spectral, Decomposition) {
  const MaterialParams m(1.0, -0.3, 10.0, 1.0);
  const SpectralState a = spectral_of(Tensor2::identity(), 0.0, m);
  EXPECT_DOUBLE_EQ(a.gamma1, 1.0);
  EXPECT_DOUBLE_EQ(a.gamma2, 1.0);
  const SpectralState b = spectral_of(Tensor2::diag(0.25, 4.0), 0.0, m);
  EXPECT_DOUBLE_EQ(b.gamma1, 4.0);
  EXPECT_DOUBLE_EQ(b.gamma2, 0.25);
  const SpectralState c = spectral_of({1.25, 0.5, 0.5, 1.0}, 0.0, m);
  EXPECT_NEAR(c.gamma1 * c.gamma2, 1.0, 1e-15);
  EXPECT_NEAR(c.gamma1 + c.gamma2, 2.25, 1e-15);
  EXPECT_NEAR(c.gamma1, (2.25 + std::sqrt(2.25 * 2.25 - 4.0)) / 2.0, 1e-15);
}

TEST(Spectral, RejectsNonSpd) {
  const MaterialParams m(1.0, -0.3, 10.0, 1.0);
  EXPECT_THROW((void)spectral_of({1.0, 2.0, 2.0, 1.0}, 0.0, m), Error);
  EXPECT_THROW((void)spectral_of({-1.0, 0.0, 0.0, -1.0}, 0.0, m), Error);
}

TEST(Spectral, InvariantsOnRandomStates) {
  Sampler rng(2);
  for (int i = 0; i < 500; ++i) {
    const MaterialParams m = rng.material();
    const Tensor2 B = support::random_spd(rng);
    const SpectralState s = spectral_of(B, rng.uniform(-5, 5), m);
    EXPECT_GE(s.gamma1, s.gamma2);
    EXPECT_GT(s.gamma2, 0.0);
    EXPECT_NEAR(s.trB0inv, s.trB0 / s.detB0, 1e-12 * s.trB0inv);
  }
}

TEST(CoercivityMatrix, IsotropicExample) {
  const CoercivityMatrix A = build_coercivity_matrix(point(1, 1, 0), 10.0, neo);
  EXPECT_DOUBLE_EQ(A.a11, 12.0);
  EXPECT_DOUBLE_EQ(A.a22, 12.0);
  EXPECT_DOUBLE_EQ(A.a12, 11.0);
  EXPECT_DOUBLE_EQ(A.a33, 2.0);
  EXPECT_DOUBLE_EQ(A.a44, 2.0);
  EXPECT_DOUBLE_EQ(A.a34, 0.0);
}

TEST(CoercivityMatrix, StretchedExample) {
  const CoercivityMatrix A = build_coercivity_matrix(point(4, 0.25, -0.7), 0.0, neo);
  EXPECT_NEAR(A.a11, 8.0, 1e-14);
  EXPECT_NEAR(A.a22, 0.5, 1e-14);
  EXPECT_NEAR(A.a12, 2.825, 1e-14);
  EXPECT_NEAR(A.a33, 2.85, 1e-14);
  EXPECT_NEAR(A.a44, 5.65, 1e-14);
  EXPECT_NEAR(A.a34, -3.75, 1e-14);
}

TEST(CoercivityMatrix, IsotropicKillsBlockTwoCoupling) {
  Sampler rng(4);
  for (int i = 0; i < 100; ++i) {
    const MaterialParams m = rng.material();
    EXPECT_EQ(build_coercivity_matrix(point(1, 1, rng.uniform(-5, 5), m), rng.uniform(0, 100), m).a34, 0.0);
  }
}

TEST(CoercivityMatrix, BlockTwoIndependentOfBeta) {
  Sampler rng(6);
  for (int i = 0; i < 100; ++i) {
    const MaterialParams m = rng.material();
    const SpectralState s = point(rng.uniform(1, 10), rng.uniform(0.1, 1), rng.uniform(-5, 5), m);
    const CoercivityMatrix a = build_coercivity_matrix(s, rng.uniform(0, 100), m);
    const CoercivityMatrix b = build_coercivity_matrix(s, rng.uniform(0, 100), m);
    EXPECT_EQ(a.a33, b.a33);
    EXPECT_EQ(a.a44, b.a44);
    EXPECT_EQ(a.a34, b.a34);
  }
}

TEST(CoercivityMatrix, DenseIsBlockDiagonal) {
  const Matrix4 d = build_coercivity_matrix(point(4, 0.25, -0.7), 3.0, neo).dense();
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 2; j < 4; ++j) {
      EXPECT_EQ(d[i][j], 0.0);
      EXPECT_EQ(d[j][i], 0.0);
    }
}

TEST(Sylvester, Examples) {
  const CoercivityMatrix A = build_coercivity_matrix(point(1, 1, 0), 10.0, neo);
  EXPECT_TRUE(sylvester_psd(A, 0.5));
  const auto q = sylvester_quantities(A, 0.5);
  EXPECT_DOUBLE_EQ(q[1], 11.25);
  EXPECT_DOUBLE_EQ(q[3], 2.25);
  EXPECT_FALSE(sylvester_psd(A, 1.1));
  EXPECT_TRUE(sylvester_psd(CoercivityMatrix{}, 0.0));
}

TEST(Sylvester, TieWithNegativeTrailingEntry) {
  CoercivityMatrix A;
  A.a11 = 1.0;
  A.a22 = -1.0;
  A.a33 = 1.0;
  A.a44 = 1.0;
  EXPECT_FALSE(sylvester_psd(A, 1.0));
  EXPECT_FALSE(oracles::psd_eigen(A, 1.0));
}

TEST(Sylvester, AgreesWithEigenvalues) {
  Sampler rng(42);
  int disagreements = 0;
  for (int i = 0; i < 10000; ++i) {
    const MaterialParams m = rng.material();
    double g1 = rng.uniform(0.1, 10), g2 = rng.uniform(0.1, 10);
    if (g1 < g2) std::swap(g1, g2);
    const CoercivityMatrix A = build_coercivity_matrix(point(g1, g2, rng.uniform(-5, 5), m), rng.uniform(0, 100), m);
    const double alpha = rng.uniform(0, 3);
    if (sylvester_psd(A, alpha) != oracles::psd_eigen(A, alpha) && std::abs(oracles::min_eigenvalue(A, alpha)) > 1e-10) {
      ++disagreements;
    }
  }
  EXPECT_EQ(disagreements, 0);
}

TEST(GapRoots, Examples) {
  const GapRoots r = gap_roots(point(1, 1, 0), 0.0, neo);
  EXPECT_DOUBLE_EQ(r.a0, -2.0);
  EXPECT_DOUBLE_EQ(r.b0, 2.0);
  EXPECT_DOUBLE_EQ(r.a_alpha, -2.0);
  EXPECT_DOUBLE_EQ(r.b_alpha, 2.0);
  EXPECT_DOUBLE_EQ(r.a_star, -2.0);
  EXPECT_DOUBLE_EQ(r.b_star, 2.0);

  const MaterialParams m(1.0, -1.0, 10.0, 1.0);
  const GapRoots q = gap_roots(point(1, 1, 0, m), 0.0, m);
  EXPECT_DOUBLE_EQ(q.a0, 0.0);
  EXPECT_DOUBLE_EQ(q.b0, 8.0);

  const GapRoots s = gap_roots(point(4, 0.25, 0), 0.0, neo);
  EXPECT_DOUBLE_EQ(s.a0, -2.0);
  EXPECT_DOUBLE_EQ(s.b0, 2.0);
}

TEST(GapRoots, AlphaTooLarge) {
  // C = 1, s1 trB0 - s2 trB0inv = 82/9: the discriminant is 2 - 82/9 < 0 at alpha = 2
  try {
    (void)gap_roots(point(9, 1.0 / 9.0, 0), 2.0, neo);
    FAIL() << "expected alpha-too-large";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::AlphaTooLarge);
  }
}

TEST(GapRoots, CompatibilityInequalitiesPointwise) {
  Sampler rng(8);
  for (int i = 0; i < 1000; ++i) {
    const MaterialParams m = rng.material();
    const double k = default_k(m);
    double g1 = rng.uniform(0.1, 10), g2 = rng.uniform(0.1, 10);
    if (g1 < g2) std::swap(g1, g2);
    if (g1 * g2 < k) continue;
    const SpectralState s = point(g1, g2, 0, m);
    const double D = stretch_ratio(s);
    const double alpha = 0.9 * alpha_upper_bound(D, k, m);
    const GapRoots r = gap_roots(s, alpha, m);
    EXPECT_GE(r.b_alpha, r.b0 - alpha * D - 1e-12 * std::abs(r.b0));
    EXPECT_LE(r.a_alpha, r.a0 + alpha * D + 1e-12 * std::abs(r.a0));
  }
}

TEST(GapInterval, NonEmptyUnderHypotheses) {
  Sampler rng(10);
  for (int i = 0; i < 1000; ++i) {
    const MaterialParams m = rng.material();
    const double k = default_k(m);
    double g1 = rng.uniform(0.1, 10), g2 = rng.uniform(0.1, 10);
    if (g1 < g2) std::swap(g1, g2);
    if (g1 * g2 < k) continue;
    const SpectralState s = point(g1, g2, 0, m);
    const double dbar = stretch_ratio(s);
    const double alpha = 0.9 * alpha_upper_bound(dbar, k, m);
    const GapRoots r = gap_roots(s, 0.0, m);
    EXPECT_GT(r.b0 - r.a0 - 2.0 * alpha * dbar, 0.0);
    const double eps = m.s1() - m.s2() / k;
    const double bound = m.s2() < 0 ? 4.0 * std::sqrt(-m.s1() * m.s2()) : 4.0 * eps * std::sqrt(k);
    EXPECT_GE(r.b0 - r.a0, bound * (1.0 - 1e-12));
  }
}

TEST(Certify, IsotropicAdmissibleWithZeroBeta) {
  const SpectralState s = point(1, 1, 0);
  const CoercivityReport r = certify(std::span(&s, 1), 0.5, 1.0, 1e6, neo);
  EXPECT_TRUE(r.admissible);
  ASSERT_TRUE(r.beta0);
  EXPECT_EQ(*r.beta0, 0.0);
  EXPECT_NO_THROW(r.require_admissible());
}

TEST(Certify, StretchedPointBeta0) {
  const SpectralState s = point(4, 0.25, -0.7);
  const CoercivityReport r = certify(std::span(&s, 1), 0.1, 0.5, 1e6, neo);
  EXPECT_TRUE(r.admissible);
  ASSERT_TRUE(r.beta0);
  EXPECT_NEAR(*r.beta0, 4.820625 / 2.65, 1e-6);
  EXPECT_TRUE(sylvester_psd(build_coercivity_matrix(s, *r.beta0, neo), 0.1));
}

TEST(Certify, GapViolationNamed) {
  const SpectralState s = point(1, 1, 3);
  const CoercivityReport r = certify(std::span(&s, 1), 0.1, 1.0, 1e6, neo);
  EXPECT_FALSE(r.admissible);
  bool gap = false;
  for (const auto& f : r.failures) gap = gap || f.check == CertificationCheck::GapCondition;
  EXPECT_TRUE(gap);
  EXPECT_STREQ(to_string(CertificationCheck::GapCondition), "gap_condition");
  try {
    r.require_admissible();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::HypothesesViolated);
    EXPECT_NE(std::string(e.what()).find("gap_condition"), std::string::npos);
  }
}

TEST(Certify, PreconditionsThrow) {
  const SpectralState s = point(1, 1, 0);
  EXPECT_THROW((void)certify(std::span(&s, 1), 0.0, 1.0, 1e6, neo), Error);
  EXPECT_THROW((void)certify(std::span(&s, 1), 0.1, 0.0, 1e6, neo), Error);
  EXPECT_THROW((void)certify(std::span(&s, 1), 0.1, 1.0, 0.0, neo), Error);
  const MaterialParams pos(1.0, 0.5, 1.0, 1.0);
  EXPECT_THROW((void)certify(std::span(&s, 1), 0.1, 0.4, 1e6, pos), Error);  // k <= s2/s1
}

TEST(Certify, BetaCapReported) {
  const SpectralState s = point(4, 0.25, -0.7);
  const CoercivityReport r = certify(std::span(&s, 1), 0.1, 0.5, 1.0, neo);
  EXPECT_FALSE(r.admissible);
  try {
    r.require_admissible();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::BetaExceedsMax);
  }
}

TEST(Certify, DefaultK) {
  EXPECT_DOUBLE_EQ(default_k(MaterialParams(1.0, -0.3, 1.0, 1.0)), 1e-3);
  EXPECT_DOUBLE_EQ(default_k(MaterialParams(1.0, 0.5, 1.0, 1.0)), 1.01 * 0.5);
  EXPECT_DOUBLE_EQ(default_k(MaterialParams(1.0, 1e-5, 1.0, 1.0)), 1e-3);
}

TEST(Certify, SoundnessAtLargerBeta) {
  Sampler rng(1234);
  int admissible = 0;
  for (int i = 0; i < 1000; ++i) {
    const MaterialParams m = rng.material();
    const double k = default_k(m);
    std::vector<SpectralState> pts;
    for (int j = 0; j < 4; ++j) {
      const double g2 = rng.uniform(0.2, 1.0);
      const double g1 = rng.uniform(std::max(g2, k / g2), std::max(g2, k / g2) + 3.0);
      const SpectralState base = point(g1, g2, 0, m);
      const GapRoots r = gap_roots(base, 0.0, m);
      const double x = rng.uniform(r.a0, r.b0);  // -2 p0 inside the alpha-free gap
      pts.push_back(point(g1, g2, -0.5 * x, m));
    }
    const double alpha = auto_alpha(pts, k, m, rng.uniform(0.05, 0.9));
    const CoercivityReport rep = certify(pts, alpha, k, 1e8, m);
    if (!rep.admissible) continue;
    ++admissible;
    const double b0 = *rep.beta0;
    for (double beta : {b0, 2 * b0 + 1, 10 * b0 + 10}) {
      for (const auto& p : pts) EXPECT_TRUE(sylvester_psd(build_coercivity_matrix(p, beta, m), alpha));
    }
  }
  EXPECT_GT(admissible, 100);
}
