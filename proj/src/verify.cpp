#include "mrsla/verify.hpp"

#include <chrono>
#include <cmath>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "mrsla/assembly.hpp"
#include "mrsla/errors.hpp"
#include "mrsla/oracles.hpp"
#include "mrsla/sla.hpp"

namespace mrsla {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double quadratic(const Matrix4& A, const std::array<double, 4>& x) {
  double s = 0.0;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) s += x[i] * A[i][j] * x[j];
  return s;
}

std::array<double, 4> coordinates(const Tensor2& H) {
  // H = [[a, b + d], [b - d, c]] -> (a, c, b, d)
  return {H(0, 0), H(1, 1), 0.5 * (H(0, 1) + H(1, 0)), 0.5 * (H(0, 1) - H(1, 0))};
}

}  // namespace

bool SuiteResult::pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return !checks.empty();
}

MaterialParams Sampler::material(double beta) {
  const double s1 = uniform(0.1, 5.0);
  const double s2 = uniform(-5.0, s1);
  return {s1, s2, beta, 1.0};
}

Tensor2 Sampler::tensor(double scale) {
  return {uniform(-scale, scale), uniform(-scale, scale), uniform(-scale, scale), uniform(-scale, scale)};
}

RunConfig patch_config(int n, double traction, double s1, double s2, double beta) {
  RunConfig c;
  c.material.s1 = s1;
  c.material.s2 = s2;
  c.material.beta = beta;
  RectangleSpec r;
  r.nx = n;
  r.ny = n;
  r.left = BoundaryKind::Slip;
  r.bottom = BoundaryKind::Slip;
  r.right = BoundaryKind::Traction;
  r.top = BoundaryKind::Traction;
  c.mesh.rectangle = r;
  TractionRule rule;
  rule.region.xmin = 1.0;
  rule.value = {traction, 0.0};
  c.boundary.traction.push_back(rule);
  c.boundary.allow_empty_clamped = true;
  c.boundary.slip_corners = SlipCornerPolicy::Clamp;
  c.schedule.scenario = "patch";
  c.certification.mode = GateMode::Off;
  return c;
}

RunConfig pure_shear_config(int n, int steps, double kappa, double s1, double s2, double beta) {
  RunConfig c;
  c.material.s1 = s1;
  c.material.s2 = s2;
  c.material.beta = beta;
  RectangleSpec r;
  r.nx = n;
  r.ny = n;
  r.bottom = BoundaryKind::Clamped;
  r.top = BoundaryKind::Clamped;
  r.left = BoundaryKind::Traction;
  r.right = BoundaryKind::Traction;
  c.mesh.rectangle = r;
  PrescribedRule top;
  top.region.ymin = 1.0;
  top.displacement = {kappa, 0.0};
  c.boundary.prescribed.push_back(top);
  c.schedule.total_steps = steps;
  c.schedule.scenario = "pure-shear";
  c.certification.mode = GateMode::Off;
  return c;
}

RunConfig affine_shear_config(int n, int steps, double kappa, double s1, double s2, double beta) {
  RunConfig c = pure_shear_config(n, steps, kappa, s1, s2, beta);
  c.mesh.rectangle->left = BoundaryKind::Clamped;
  c.mesh.rectangle->right = BoundaryKind::Clamped;
  PrescribedRule all;
  all.gradient = {0.0, kappa, 0.0, 0.0};
  c.boundary.prescribed = {all};
  c.schedule.scenario = "affine-shear";
  return c;
}

SuiteResult verify_quadform(const VerifyOptions& options) {
  const auto t0 = Clock::now();
  SuiteResult r{"quadform", {}, 0.0};
  Sampler rng(options.seed);
  double worst_blocks = 0.0;
  double worst_matrix = 0.0;
  double worst_pair = 0.0;
  for (int i = 0; i < options.trials; ++i) {
    const MaterialParams params = rng.material();
    double g1 = rng.uniform(0.1, 10.0);
    double g2 = rng.uniform(0.1, 10.0);
    if (g1 < g2) std::swap(g1, g2);
    const double p0 = rng.uniform(-5.0, 5.0);
    const double beta = rng.uniform(0.0, 100.0);
    const Tensor2 H = rng.tensor();
    const double trace_form = oracles::quadform_trace(H, g1, g2, p0, beta, params);
    const double blocks = oracles::quadform_blocks(H, g1, g2, p0, beta, params);
    const double scale = oracles::quadform_scale(H, g1, g2, p0, beta, params);
    const Matrix4 A = options.builder(SpectralState::from_eigenvalues(g1, g2, p0, params), beta, params).dense();
    const double xax = quadratic(A, coordinates(H));
    worst_blocks = std::max(worst_blocks, oracles::relative_difference(trace_form, blocks, scale));
    worst_matrix = std::max(worst_matrix, oracles::relative_difference(trace_form, xax, scale));
    worst_pair = std::max(worst_pair, oracles::relative_difference(blocks, xax, scale));
  }
  r.checks.push_back({"trace form vs block form", worst_blocks <= 1e-12, "max relative difference " + fmt(worst_blocks)});
  r.checks.push_back({"trace form vs X^T A X", worst_matrix <= 1e-12, "max relative difference " + fmt(worst_matrix)});
  r.checks.push_back({"block form vs X^T A X", worst_pair <= 1e-12, "max relative difference " + fmt(worst_pair)});
  r.seconds = seconds_since(t0);
  return r;
}

SuiteResult verify_psd(const VerifyOptions& options) {
  const auto t0 = Clock::now();
  SuiteResult r{"psd", {}, 0.0};
  Sampler rng(options.seed);

  // entries of A against the polarized quadratic form
  double worst_entry = 0.0;
  const int entry_trials = std::max(1, options.trials / 10);
  for (int i = 0; i < entry_trials; ++i) {
    const MaterialParams params = rng.material();
    double g1 = rng.uniform(0.1, 10.0);
    double g2 = rng.uniform(0.1, 10.0);
    if (g1 < g2) std::swap(g1, g2);
    const double p0 = rng.uniform(-5.0, 5.0);
    const double beta = rng.uniform(0.0, 100.0);
    const Matrix4 A = options.builder(SpectralState::from_eigenvalues(g1, g2, p0, params), beta, params).dense();
    const Matrix4 Q = oracles::quadform_matrix(g1, g2, p0, beta, params);
    double scale = 1.0;
    for (const auto& row : Q)
      for (double v : row) scale = std::max(scale, std::abs(v));
    for (std::size_t a = 0; a < 4; ++a)
      for (std::size_t b = 0; b < 4; ++b) worst_entry = std::max(worst_entry, std::abs(A[a][b] - Q[a][b]) / scale);
  }
  r.checks.push_back({"coercivity matrix vs polarized form", worst_entry <= 1e-10, "max entry error " + fmt(worst_entry)});

  // Sylvester test against eigenvalues
  int disagreements = 0;
  int in_band = 0;
  int psd_count = 0;
  for (int i = 0; i < options.trials; ++i) {
    CoercivityMatrix A;
    if (i % 2 == 0) {
      const MaterialParams params = rng.material();
      double g1 = rng.uniform(0.1, 10.0);
      double g2 = rng.uniform(0.1, 10.0);
      if (g1 < g2) std::swap(g1, g2);
      A = options.builder(SpectralState::from_eigenvalues(g1, g2, rng.uniform(-5.0, 5.0), params),
                          rng.uniform(0.0, 100.0), params);
    } else {
      A.a11 = rng.uniform(-10.0, 10.0);
      A.a22 = rng.uniform(-10.0, 10.0);
      A.a12 = rng.uniform(-10.0, 10.0);
      A.a33 = rng.uniform(-10.0, 10.0);
      A.a44 = rng.uniform(-10.0, 10.0);
      A.a34 = rng.uniform(-10.0, 10.0);
    }
    const double lambda = oracles::min_eigenvalue(A, 0.0);
    // half the shifts land right next to the smallest eigenvalue
    const double alpha = (i / 2) % 2 == 0 || !(lambda > 0.0) ? rng.uniform(0.0, 3.0)
                                                             : lambda * (1.0 + rng.uniform(-1e-6, 1e-6));
    const bool sylvester = sylvester_psd(A, alpha);
    const bool eigen = oracles::psd_eigen(A, alpha);
    psd_count += eigen ? 1 : 0;
    if (sylvester != eigen) {
      if (std::abs(oracles::min_eigenvalue(A, alpha)) <= 1e-10) {
        ++in_band;
      } else {
        ++disagreements;
      }
    }
  }
  r.checks.push_back({"Sylvester vs eigenvalues", disagreements == 0,
                      std::to_string(disagreements) + " disagreements, " + std::to_string(in_band) +
                          " inside the 1e-10 band, " + std::to_string(psd_count) + "/" +
                          std::to_string(options.trials) + " PSD"});
  r.seconds = seconds_since(t0);
  return r;
}

SuiteResult verify_patch(const VerifyOptions&) {
  const auto t0 = Clock::now();
  SuiteResult r{"patch", {}, 0.0};
  const double traction = 0.01;
  const RunConfig config = patch_config(8, traction);
  const MaterialParams params = config.params();
  const RunState state = initial_state(config);
  const DofMap dofs = DofMap::build(state.mesh, config.boundary.slip_corners);
  std::vector<Vec2> tractions(state.mesh.boundary_edges.size());
  for (std::size_t e = 0; e < tractions.size(); ++e) {
    const auto& edge = state.mesh.boundary_edges[e];
    const Vec2 mid = 0.5 * (state.mesh.nodes[static_cast<std::size_t>(edge.a)] + state.mesh.nodes[static_cast<std::size_t>(edge.b)]);
    if (edge.kind == BoundaryKind::Traction && config.boundary.traction[0].region.contains(mid)) {
      tractions[e] = config.boundary.traction[0].value;
    }
  }
  const LinearSystem sys = assemble(state.mesh, state.states, params.beta(), params, tractions, false, dofs);
  const Solution sol = solve(sys);
  const std::vector<Tensor2> H = element_gradients(state.mesh, sol.displacement);

  Tensor2 mean;
  for (const auto& h : H) mean += h;
  mean = (1.0 / static_cast<double>(H.size())) * mean;
  double variance = 0.0;
  for (std::size_t c = 0; c < 4; ++c) {
    double v = 0.0;
    for (const auto& h : H) v += (h.a[c] - mean.a[c]) * (h.a[c] - mean.a[c]);
    variance = std::max(variance, v / static_cast<double>(H.size()));
  }
  const Tensor2 expected = oracles::patch_gradient(traction, params.beta(), params);
  double err = 0.0;
  for (const auto& h : H) err = std::max(err, frobenius(h - expected) / frobenius(expected));
  const double residual =
      oracles::traction_residual(state.mesh, state.states, sol.displacement, tractions, params.beta(), params);

  r.checks.push_back({"gradient variance", variance <= 1e-9, "max component variance " + fmt(variance)});
  r.checks.push_back({"gradient vs closed form", err <= 1e-8, "max relative error " + fmt(err)});
  r.checks.push_back({"traction residual", residual <= 1e-12, "residual " + fmt(residual)});
  r.seconds = seconds_since(t0);
  return r;
}

SuiteResult verify_pure_shear(const VerifyOptions&) {
  const auto t0 = Clock::now();
  SuiteResult r{"pure-shear", {}, 0.0};
  const RunConfig config = pure_shear_config(16, 40);
  const RunResult res = run(config);
  const double expected = oracles::pure_shear(0.2, config.params()).T12;
  const double t12 = mean_shear_stress(res.state);
  const double rel = std::abs(t12 - expected) / std::abs(expected);
  double volume = 0.0;
  for (const auto& q : res.state.states) volume = std::max(volume, std::abs(det(q.F) - 1.0));
  r.checks.push_back({"mean T12 vs simple shear", rel <= 0.02,
                      "mean T12 " + fmt(t12) + ", expected " + fmt(expected) + ", relative error " + fmt(rel)});
  r.checks.push_back({"volume change", volume <= 0.01, "max |det F - 1| " + fmt(volume)});

  const RunResult affine = run(affine_shear_config(16, 40));
  const double t12_affine = mean_shear_stress(affine.state);
  const double rel_affine = std::abs(t12_affine - expected) / std::abs(expected);
  r.checks.push_back({"mean T12 vs simple shear, affine boundary data", rel_affine <= 0.02,
                      "mean T12 " + fmt(t12_affine) + ", relative error " + fmt(rel_affine)});
  r.seconds = seconds_since(t0);
  return r;
}

std::vector<SuiteResult> run_verify(const std::string& name, const VerifyOptions& options) {
  if (name == "quadform") return {verify_quadform(options)};
  if (name == "psd") return {verify_psd(options)};
  if (name == "patch") return {verify_patch(options)};
  if (name == "pure-shear") return {verify_pure_shear(options)};
  if (name == "all") {
    return {verify_psd(options), verify_quadform(options), verify_patch(options), verify_pure_shear(options)};
  }
  throw Error(ErrorKind::InvalidArgument, "unknown suite '" + name + "' (quadform, psd, patch, pure-shear, all)");
}

void print_results(const std::vector<SuiteResult>& results, std::ostream& out) {
  for (const auto& s : results) {
    for (const auto& c : s.checks) {
      out << (c.pass ? "PASS " : "FAIL ") << s.suite << ": " << c.name << " (" << c.detail << ")\n";
    }
  }
}

std::string results_json(const std::vector<SuiteResult>& results) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& s : results) {
    nlohmann::json x;
    x["suite"] = s.suite;
    x["pass"] = s.pass();
    x["seconds"] = s.seconds;
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : s.checks) checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    x["checks"] = checks;
    j.push_back(x);
  }
  return j.dump(2);
}

}  // namespace mrsla
