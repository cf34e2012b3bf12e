// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and exits nonzero
// when any criterion fails. Runtime limits are part of each criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "mrsla/assembly.hpp"
#include "mrsla/coercivity.hpp"
#include "mrsla/oracles.hpp"
#include "mrsla/sla.hpp"
#include "mrsla/verify.hpp"

using namespace mrsla;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, const char* spec = "%.6g") {
  char buf[48];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

int failures = 0;

void criterion(int id, const std::string& name, double limit_seconds, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  const bool in_time = limit_seconds <= 0.0 || seconds < limit_seconds;
  const bool pass = o.pass && in_time;
  failures += pass ? 0 : 1;
  std::cout << (pass ? "PASS " : "FAIL ") << id << ". " << name << ": " << o.detail << " [" << fmt(seconds, "%.2f") << " s";
  if (limit_seconds > 0.0) std::cout << " / limit " << fmt(limit_seconds, "%.0f") << " s";
  std::cout << "]" << std::endl;
}

Outcome from_suite(const SuiteResult& s) {
  Outcome o{s.pass(), ""};
  for (const auto& c : s.checks) {
    if (!o.detail.empty()) o.detail += "; ";
    o.detail += std::string(c.pass ? "" : "FAILED ") + c.name + " (" + c.detail + ")";
  }
  return o;
}

Tensor2 random_deformation(Sampler& rng, double spread) {
  for (;;) {
    const Tensor2 F = Tensor2::identity() + rng.tensor(spread);
    const double J = det(F);
    if (J >= 0.5 && J <= 2.0) return F;
  }
}

// Random points whose -2 p0 lies inside the alpha-free gap, so that certification can succeed.
std::vector<SpectralState> gap_points(Sampler& rng, const MaterialParams& m, double k, int count) {
  std::vector<SpectralState> pts;
  for (int j = 0; j < count; ++j) {
    const double g2 = rng.uniform(0.2, 1.0);
    const double lo = std::max(g2, k / g2);
    const double g1 = rng.uniform(lo, lo + 3.0);
    const GapRoots r = gap_roots(SpectralState::from_eigenvalues(g1, g2, 0.0, m), 0.0, m);
    pts.push_back(SpectralState::from_eigenvalues(g1, g2, -0.5 * rng.uniform(r.a0, r.b0), m));
  }
  return pts;
}

Outcome soundness() {
  Sampler rng(2024);
  int sets = 0, attempts = 0, violations = 0;
  while (sets < 1000 && attempts < 100000) {
    ++attempts;
    const MaterialParams m = rng.material();
    const double k = default_k(m);
    const auto pts = gap_points(rng, m, k, 4);
    const double alpha = auto_alpha(pts, k, m, rng.uniform(0.05, 0.9));
    const CoercivityReport rep = certify(pts, alpha, k, 1e8, m);
    if (!rep.admissible) continue;
    ++sets;
    const double b0 = *rep.beta0;
    for (double beta : {b0, 2 * b0 + 1, 10 * b0 + 10})
      for (const auto& p : pts) violations += sylvester_psd(build_coercivity_matrix(p, beta, m), alpha) ? 0 : 1;
  }
  const MaterialParams neo(1.0, 0.0, 10.0, 1.0);
  const SpectralState hand = SpectralState::from_eigenvalues(4.0, 0.25, -0.7, neo);
  const CoercivityReport rep = certify(std::span(&hand, 1), 0.1, 0.5, 1e8, neo);
  const double beta0 = rep.beta0.value_or(std::nan(""));
  const bool hand_ok = rep.admissible && std::abs(beta0 - 1.819104) <= 1e-5;
  return {sets == 1000 && violations == 0 && hand_ok,
          std::to_string(sets) + " admissible sets (" + std::to_string(attempts) + " drawn), " +
              std::to_string(violations) + " PSD violations at beta0, 2beta0+1, 10beta0+10; hand case beta0 = " +
              fmt(beta0, "%.7f") + " (expected 1.819104 +- 1e-5)"};
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(y.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) sxy += (x[i] - mx) * (y[i] - my), sxx += (x[i] - mx) * (x[i] - mx);
  return sxy / sxx;
}

// Exact relative Piola-Kirchhoff stress after the step I + H, with the pressure following
// the logarithmic law whose derivative is the linearized update p+ = p - beta tr H.
Tensor2 exact_piola(const Tensor2& F, double p, const Tensor2& H, const MaterialParams& m) {
  const Tensor2 G = Tensor2::identity() + H;
  const double J = det(G);
  const Tensor2 Fn = G * F;
  const Tensor2 T = cauchy_stress(Fn * transpose(Fn), p - m.beta() * std::log(J), m);
  return J * T * transpose(inverse(G));
}

Outcome linearization_order() {
  Sampler rng(7);
  double lo = 1e300, hi = -1e300;
  int bad = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const MaterialParams base = rng.material();
    const MaterialParams m(base.s1(), base.s2(), rng.uniform(0.0, 100.0), 1.0);
    const Tensor2 F = random_deformation(rng, 0.6);
    const double p = rng.uniform(-5.0, 5.0);
    const Tensor2 B = F * transpose(F);
    const Tensor2 T0 = cauchy_stress(B, p, m);
    const Tensor2 H = rng.tensor();
    std::vector<double> lt, le;
    for (double t : {1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
      const Tensor2 rem = exact_piola(F, p, t * H, m) - linearized_piola_kirchhoff(T0, t * H, B, m.beta(), m);
      lt.push_back(std::log10(t * frobenius(H)));
      le.push_back(std::log10(frobenius(rem)));
    }
    const double slope = least_squares_slope(lt, le);
    lo = std::min(lo, slope);
    hi = std::max(hi, slope);
    bad += std::abs(slope - 2.0) <= 0.1 ? 0 : 1;
  }
  return {bad == 0, "slopes in [" + fmt(lo, "%.4f") + ", " + fmt(hi, "%.4f") + "] over 100 states, " +
                        std::to_string(bad) + " outside 2 +- 0.1"};
}

Outcome pure_shear_end_to_end() {
  const double expected = oracles::pure_shear(0.2, pure_shear_config(16, 40).params()).T12;
  std::vector<double> errors;
  std::string detail;
  double t12_40 = 0.0, volume_40 = 0.0;
  for (int steps : {20, 40, 80}) {
    const RunResult r = run(pure_shear_config(16, steps));
    const double t12 = mean_shear_stress(r.state);
    errors.push_back(std::abs(t12 - expected) / expected);
    if (steps == 40) {
      t12_40 = t12;
      for (const auto& q : r.state.states) volume_40 = std::max(volume_40, std::abs(det(q.F) - 1.0));
    }
    detail += "N=" + std::to_string(steps) + " T12 " + fmt(t12) + " (rel err " + fmt(errors.back(), "%.4f") + "); ";
  }
  const bool within = std::abs(t12_40 - expected) / expected <= 0.02;
  const bool volume = volume_40 <= 0.01;
  const bool monotone = errors[1] < errors[0] && errors[2] < errors[1];
  detail += "expected " + fmt(expected) + "; within 2%: " + (within ? "yes" : "no") + "; max |det F - 1| " +
            fmt(volume_40) + (volume ? " ok" : " too large") + "; error decreasing in N: " + (monotone ? "yes" : "no");
  return {within && volume && monotone, detail};
}

Outcome discrete_coercivity() {
  Sampler rng(99);
  RectangleSpec spec;
  spec.nx = spec.ny = 4;
  spec.bottom = BoundaryKind::Clamped;
  spec.left = BoundaryKind::Slip;
  spec.right = spec.top = BoundaryKind::Traction;
  const Mesh mesh = rectangle_mesh(spec);
  const DofMap dofs = DofMap::build(mesh);

  auto check = [&](const std::vector<QuadPointState>& states, double alpha, double beta, const MaterialParams& m,
                   double& worst) {
    const LinearSystem sys = assemble(mesh, states, beta, m, {}, false, dofs);
    int violations = 0;
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> x(dofs.dof_count);
      for (auto& v : x) v = rng.uniform(-1.0, 1.0);
      const auto Mx = sys.matrix.multiply(x);
      double q = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) q += x[i] * Mx[i];
      const auto H = element_gradients(mesh, expand_solution(dofs, x, {}));
      double norm = 0.0;
      for (std::size_t t = 0; t < H.size(); ++t) norm += p1_geometry(mesh, t).area * ddot(H[t], H[t]);
      const double bound = 0.5 * alpha * norm;
      worst = std::min(worst, (q - bound) / bound);
      violations += q >= bound * (1.0 - 1e-10) ? 0 : 1;
    }
    return violations;
  };

  int configs = 0, violations = 0, attempts = 0;
  double worst = 1e300;
  // Five homogeneous pre-stressed configurations, then five with independent per-element
  // deformations and pressures; each is certified before the check.
  while (configs < 10 && attempts < 10000) {
    ++attempts;
    const bool uniform = configs < 5;
    const MaterialParams m0 = rng.material();
    const double k = default_k(m0);
    const Tensor2 base = random_deformation(rng, 0.4);
    std::vector<Tensor2> F;
    std::vector<double> p;
    std::vector<SpectralState> pts;
    bool ok = true;
    for (std::size_t t = 0; t < mesh.triangle_count() && ok; ++t) {
      if (uniform && t > 0) {
        F.push_back(F[0]);
        p.push_back(p[0]);
        pts.push_back(pts[0]);
        continue;
      }
      const Tensor2 Fe = uniform ? base : base + rng.tensor(0.05);
      const Tensor2 B = Fe * transpose(Fe);
      if (!(det(Fe) > 0.0) || det(B) < k) {
        ok = false;
        break;
      }
      const GapRoots r = gap_roots(spectral_of(B, 0.0, m0), 0.0, m0);
      const double pe = -0.5 * rng.uniform(r.a0, r.b0);
      F.push_back(Fe);
      p.push_back(pe);
      pts.push_back(spectral_of(B, pe, m0));
    }
    if (!ok) continue;
    const double alpha = auto_alpha(pts, k, m0, 0.5);
    const CoercivityReport rep = certify(pts, alpha, k, 1e8, m0);
    if (!rep.admissible) continue;
    const double beta = std::max(*rep.beta0, 1e-3);
    const MaterialParams m(m0.s1(), m0.s2(), beta, 1.0);
    std::vector<QuadPointState> states;
    for (std::size_t t = 0; t < F.size(); ++t) states.push_back(QuadPointState::from_deformation(F[t], p[t], m));
    violations += check(states, alpha, beta, m, worst);
    ++configs;
  }
  return {configs == 10 && violations == 0,
          std::to_string(configs) + " certified configurations (5 uniform, 5 element-wise) x 100 random u at beta = beta0, " + std::to_string(violations) +
              " violations; smallest relative excess " + fmt(worst)};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  const auto root = std::filesystem::temp_directory_path() / "mrsla_acceptance_determinism";
  std::filesystem::remove_all(root);
  for (const char* name : {"a", "b"}) {
    RunConfig c = pure_shear_config(16, 40);
    c.output.dir = root / name;
    c.output.csv_every = 1;
    (void)run(c);
  }
  int files = 0, differing = 0;
  for (const auto& entry : std::filesystem::directory_iterator(root / "a")) {
    if (entry.path().extension() != ".csv") continue;
    ++files;
    const auto other = root / "b" / entry.path().filename();
    differing += std::filesystem::exists(other) && slurp(entry.path()) == slurp(other) ? 0 : 1;
  }
  std::filesystem::remove_all(root);
  return {files > 0 && differing == 0,
          std::to_string(files) + " CSV files compared, " + std::to_string(differing) + " differ"};
}

}  // namespace

int main() {
  VerifyOptions options;
  options.seed = 42;
  options.trials = 10000;

  criterion(1, "quadratic form identity (trace, block, X^T A X; 1e4 trials, 1e-12)", 5.0,
            [&] { return from_suite(verify_quadform(options)); });
  criterion(2, "Sylvester test vs eigenvalues (1e4 trials, band 1e-10)", 5.0,
            [&] { return from_suite(verify_psd(options)); });
  criterion(3, "certificate soundness and hand-derived beta0", 10.0, soundness);
  criterion(4, "linearization remainder slope 2 +- 0.1", 5.0, linearization_order);
  criterion(5, "uniaxial patch test on 8x8 mesh", 2.0, [&] { return from_suite(verify_patch(options)); });
  criterion(6, "pure shear end to end (16x16, kappa 0.2, 40 steps)", 60.0, pure_shear_end_to_end);
  criterion(7, "discrete coercivity transfer", 5.0, discrete_coercivity);
  criterion(8, "determinism of pure-shear CSV outputs", 0.0, determinism);

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criterion(s) failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
