#include "mrsla/sla.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>

#include "json.hpp"
#include "mrsla/errors.hpp"

namespace mrsla {

using nlohmann::json;

namespace {

std::string step_name(const char* stem, int step, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%04d.%s", stem, step, ext);
  return buf;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  return out;
}

bool due(int step, int every, int total) { return step == total || (every > 0 && step % every == 0); }

/// Final traction per boundary edge from the rules, matched on initial edge midpoints.
std::vector<Vec2> final_tractions(const RunConfig& config, const RunState& state, std::vector<std::string>& warnings) {
  const auto& edges = state.mesh.boundary_edges;
  std::vector<Vec2> out(edges.size());
  std::vector<bool> used(config.boundary.traction.size(), false);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (edges[e].kind != BoundaryKind::Traction) continue;
    const Vec2 mid = 0.5 * (state.initial[static_cast<std::size_t>(edges[e].a)] + state.initial[static_cast<std::size_t>(edges[e].b)]);
    for (std::size_t r = 0; r < config.boundary.traction.size(); ++r) {
      if (config.boundary.traction[r].region.contains(mid)) {
        out[e] = config.boundary.traction[r].value;
        used[r] = true;
        break;
      }
    }
  }
  for (std::size_t r = 0; r < used.size(); ++r) {
    if (!used[r]) warnings.push_back("traction rule " + std::to_string(r) + " matches no traction edge");
  }
  return out;
}

/// Total prescribed displacement per node; only clamped nodes take part.
std::vector<Vec2> final_prescribed(const RunConfig& config, const RunState& state, const DofMap& dofs,
                                   std::vector<std::string>& warnings) {
  std::vector<Vec2> out(state.mesh.node_count());
  std::vector<bool> used(config.boundary.prescribed.size(), false);
  for (std::size_t n = 0; n < out.size(); ++n) {
    if (dofs.kind[n] != NodeConstraint::Clamped) continue;
    for (std::size_t r = 0; r < config.boundary.prescribed.size(); ++r) {
      if (config.boundary.prescribed[r].region.contains(state.initial[n])) {
        out[n] = config.boundary.prescribed[r].at(state.initial[n]);
        used[r] = true;
        break;
      }
    }
  }
  for (std::size_t r = 0; r < used.size(); ++r) {
    if (!used[r]) warnings.push_back("prescribed rule " + std::to_string(r) + " matches no clamped node");
  }
  return out;
}

void warn(const RunControl& control, std::vector<std::string>& warnings, const std::string& msg) {
  warnings.push_back(msg);
  if (control.log) *control.log << "warning: " << msg << '\n';
}

json tensor_json(const Tensor2& t) { return json::array({json::array({t(0, 0), t(0, 1)}), json::array({t(1, 0), t(1, 1)})}); }

json optional_number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

std::vector<Vec2> RunState::displacement() const {
  std::vector<Vec2> u(mesh.node_count());
  for (std::size_t n = 0; n < u.size(); ++n) u[n] = mesh.nodes[n] - initial[n];
  return u;
}

RunState initial_state(const RunConfig& config) {
  const MaterialParams params = config.params();
  RunState s;
  s.mesh = config.build_mesh();
  s.initial = s.mesh.nodes;
  s.states.assign(s.mesh.triangle_count(),
                  QuadPointState::from_deformation(config.material.F_initial, config.material.initial_pressure(), params));
  return s;
}

std::vector<SpectralState> spectral_points(const RunState& state, const MaterialParams& params) {
  std::vector<SpectralState> pts;
  pts.reserve(state.states.size());
  for (const auto& q : state.states) pts.push_back(spectral_of(q.B0, q.p0, params));
  return pts;
}

DiagnosticsRecord step_diagnostics(const RunState& state, std::span<const Tensor2> increments, double solver_residual,
                                   const MaterialParams& params) {
  DiagnosticsRecord d;
  d.step = state.step;
  d.solver_residual = solver_residual;
  for (const auto& H : increments) d.max_increment = std::max(d.max_increment, max_abs(H));
  double drift = 0.0;
  for (const auto& q : state.states) {
    drift += density_drift(q, params);
    d.max_volume_change = std::max(d.max_volume_change, std::abs(det(q.F) - 1.0));
  }
  if (!state.states.empty()) drift /= static_cast<double>(state.states.size());
  d.density_drift = drift;
  d.mean_shear_stress = mean_shear_stress(state);
  return d;
}

double mean_shear_stress(const RunState& state) {
  if (state.states.empty()) return 0.0;
  double s = 0.0;
  for (const auto& q : state.states) s += q.T0(0, 1);
  return s / static_cast<double>(state.states.size());
}

RunResult run(const RunConfig& config, const RunControl& control) {
  return run(config, initial_state(config), control);
}

RunResult run(const RunConfig& config, RunState state, const RunControl& control) {
  const MaterialParams params = config.params();
  const double beta = params.beta();
  const int total = config.schedule.total_steps;
  RunResult result;

  const DofMap initial_dofs = DofMap::build(state.mesh, config.boundary.slip_corners);
  const std::vector<Vec2> traction_final = final_tractions(config, state, result.warnings);
  const std::vector<Vec2> prescribed_final = final_prescribed(config, state, initial_dofs, result.warnings);
  if (control.log) {
    for (const auto& w : result.warnings) *control.log << "warning: " << w << '\n';
  }

  const double k = config.certification.k.value_or(default_k(params));
  const bool write = !config.output.dir.empty();
  if (write) std::filesystem::create_directories(config.output.dir);

  SolveOptions solve_opts;
  solve_opts.tol = config.solver.tol;
  solve_opts.max_iter = config.solver.max_iter;
  solve_opts.method = config.solver.method;

  std::vector<Vec2> tractions(traction_final.size());
  std::vector<Vec2> prescribed(prescribed_final.size());
  bool gate_warned = false;

  for (int step = state.step + 1; step <= total; ++step) {
    const double amp = config.schedule.amplitude(step);
    const double damp = amp - config.schedule.amplitude(step - 1);

    // coercivity of the operator about the current state
    const std::vector<SpectralState> points = spectral_points(state, params);
    const double alpha = config.certification.alpha.value_or(auto_alpha(points, k, params));
    double margin = std::numeric_limits<double>::infinity();
    for (const auto& p : points) margin = std::min(margin, sylvester_margin(build_coercivity_matrix(p, beta, params), alpha));
    std::optional<GateRecord> gate;
    if (config.certification.mode != GateMode::Off) {
      const CoercivityReport report = certify(points, alpha, k, config.certification.beta_max, params);
      GateRecord g;
      g.admissible = report.admissible;
      g.covers_beta = report.covers(beta);
      g.beta0 = report.beta0;
      g.alpha = alpha;
      if (!report.failures.empty()) {
        g.first_failure = std::string(to_string(report.failures.front().check)) + ": " + report.failures.front().message;
      } else if (!g.covers_beta && report.beta0) {
        g.first_failure = "beta = " + format_double(beta) + " is below beta0 = " + format_double(*report.beta0);
      }
      if (!g.covers_beta) {
        if (config.certification.mode == GateMode::Strict) {
          if (!report.admissible) report.require_admissible();
          throw Error(ErrorKind::BetaExceedsMax, "step " + std::to_string(step) + ": " + g.first_failure);
        }
        if (!gate_warned) {
          warn(control, result.warnings,
               "step " + std::to_string(step) + " is not certified coercive (" + g.first_failure +
                   "); continuing because the gate is 'warn'");
          gate_warned = true;
        }
      }
      gate = g;
    }

    for (std::size_t e = 0; e < tractions.size(); ++e) tractions[e] = amp * traction_final[e];
    for (std::size_t n = 0; n < prescribed.size(); ++n) prescribed[n] = damp * prescribed_final[n];

    const DofMap dofs = DofMap::build(state.mesh, config.boundary.slip_corners);
    const LinearSystem system =
        assemble(state.mesh, state.states, beta, params, tractions, config.schedule.gravity, dofs, prescribed);
    const Solution sol = solve(system, solve_opts);
    std::vector<Tensor2> H = element_gradients(state.mesh, sol.displacement);

    double hmax = 0.0;
    for (const auto& h : H) hmax = std::max(hmax, max_abs(h));
    if (!(hmax <= config.solver.step_guard)) {
      throw Error(ErrorKind::StepTooLarge, "step " + std::to_string(step) + ": max |H| = " + format_double(hmax) +
                                               " exceeds the step guard " + format_double(config.solver.step_guard) +
                                               "; raise schedule.total_steps");
    }

    // states first, then coordinates, so B0 and the mesh describe the same configuration
    for (std::size_t t = 0; t < H.size(); ++t) state.states[t] = update_state(state.states[t], H[t], beta, params);
    for (std::size_t n = 0; n < state.mesh.node_count(); ++n) state.mesh.nodes[n] += sol.displacement[n];
    state.step = step;

    DiagnosticsRecord d = step_diagnostics(state, H, sol.residual, params);
    d.amplitude = amp;
    d.min_margin = margin;
    d.solver_iterations = sol.iterations;
    d.solver = sol.method;
    d.gate = gate;
    result.steps.push_back(d);
    if (control.record_increments) result.increments.push_back(std::move(H));

    if (write) {
      if (due(step, config.output.csv_every, total)) {
        Mesh reference = state.mesh;
        reference.nodes = state.initial;
        auto out = open_output(config.output.dir / step_name("displacement", step, "csv"));
        write_displacement_csv(reference, state.displacement(), out);
        auto elems = open_output(config.output.dir / step_name("elements", step, "csv"));
        write_element_csv(state, elems);
      }
      if (due(step, config.output.vtk_every, total) && config.output.vtk_every > 0) {
        VtkFields f;
        f.point_vectors.emplace_back("displacement", state.displacement());
        std::vector<Tensor2> F, T;
        std::vector<double> p, rho;
        for (const auto& q : state.states) {
          F.push_back(q.F);
          T.push_back(q.T0);
          p.push_back(q.p0);
          rho.push_back(q.rho);
        }
        f.cell_tensors.emplace_back("F", std::move(F));
        f.cell_tensors.emplace_back("stress", std::move(T));
        f.cell_scalars.emplace_back("pressure", std::move(p));
        f.cell_scalars.emplace_back("density", std::move(rho));
        write_vtk(state.mesh, f, config.output.dir / step_name("snapshot", step, "vtk"));
      }
    }
    if (control.log) {
      *control.log << "step " << step << "/" << total << "  max|H| " << format_double(d.max_increment) << "  residual "
                   << format_double(d.solver_residual) << '\n';
    }
  }

  result.state = std::move(state);
  if (write) {
    auto steps = open_output(config.output.dir / "steps.csv");
    steps << "step,amplitude,max_increment,density_drift,max_volume_change,min_margin,solver_residual,solver_iterations,"
             "mean_T12\n";
    for (const auto& d : result.steps) {
      steps << d.step << ',' << format_double(d.amplitude) << ',' << format_double(d.max_increment) << ','
            << format_double(d.density_drift) << ',' << format_double(d.max_volume_change) << ','
            << format_double(d.min_margin) << ',' << format_double(d.solver_residual) << ',' << d.solver_iterations
            << ',' << format_double(d.mean_shear_stress) << '\n';
    }
    auto summary = open_output(config.output.dir / "summary.json");
    summary << summary_json(config, result) << '\n';
  }
  return result;
}

void write_element_csv(const RunState& state, std::ostream& out) {
  out << "element,F11,F12,F21,F22,T11,T12,T21,T22,p,rho,detF\n";
  for (std::size_t t = 0; t < state.states.size(); ++t) {
    const auto& q = state.states[t];
    out << t;
    for (double v : q.F.a) out << ',' << format_double(v);
    for (double v : q.T0.a) out << ',' << format_double(v);
    out << ',' << format_double(q.p0) << ',' << format_double(q.rho) << ',' << format_double(det(q.F)) << '\n';
  }
}

std::string summary_json(const RunConfig& config, const RunResult& result) {
  json j;
  j["scenario"] = config.schedule.scenario;
  j["total_steps"] = config.schedule.total_steps;
  j["beta"] = config.material.beta;
  j["certification_mode"] = to_string(config.certification.mode);
  json steps = json::array();
  for (const auto& d : result.steps) {
    json s;
    s["step"] = d.step;
    s["amplitude"] = d.amplitude;
    s["max_increment"] = d.max_increment;
    s["density_drift"] = d.density_drift;
    s["max_volume_change"] = d.max_volume_change;
    s["min_margin"] = optional_number(d.min_margin);
    s["solver_residual"] = d.solver_residual;
    s["solver_iterations"] = d.solver_iterations;
    s["solver"] = to_string(d.solver);
    s["mean_T12"] = d.mean_shear_stress;
    if (d.gate) {
      json g;
      g["admissible"] = d.gate->admissible;
      g["covers_beta"] = d.gate->covers_beta;
      g["alpha"] = d.gate->alpha;
      g["beta0"] = d.gate->beta0 ? json(*d.gate->beta0) : json(nullptr);
      if (!d.gate->first_failure.empty()) g["first_failure"] = d.gate->first_failure;
      s["certification"] = g;
    }
    steps.push_back(s);
  }
  j["steps"] = steps;
  json fin;
  const auto& st = result.state;
  fin["step"] = st.step;
  fin["mean_T12"] = mean_shear_stress(st);
  double dev = 0.0;
  double drift = 0.0;
  for (const auto& q : st.states) {
    dev = std::max(dev, std::abs(det(q.F) - 1.0));
    drift += density_drift(q, config.params());
  }
  fin["max_volume_change"] = dev;
  fin["mean_density_drift"] = st.states.empty() ? 0.0 : drift / static_cast<double>(st.states.size());
  if (!st.states.empty()) {
    Tensor2 mean;
    for (const auto& q : st.states) mean += q.F;
    fin["mean_F"] = tensor_json((1.0 / static_cast<double>(st.states.size())) * mean);
  }
  j["final"] = fin;
  j["warnings"] = result.warnings;
  return j.dump(2);
}

std::string report_json(const CoercivityReport& r) {
  json j;
  j["admissible"] = r.admissible;
  j["k"] = r.k;
  j["epsilon"] = r.epsilon;
  j["dbar"] = r.dbar;
  j["alpha"] = r.alpha;
  j["alpha_max"] = r.alpha_max;
  j["beta_max"] = r.beta_max;
  j["beta0"] = r.beta0 ? json(*r.beta0) : json(nullptr);
  j["worst_point"] = r.worst_point;
  if (!r.gap_lo.empty()) {
    j["gap_margin"] = std::min(r.gap_lo[r.worst_point], r.gap_hi[r.worst_point]);
  }
  json failures = json::array();
  for (const auto& f : r.failures) {
    json x;
    x["check"] = to_string(f.check);
    x["point"] = f.point ? json(*f.point) : json(nullptr);
    x["message"] = f.message;
    failures.push_back(x);
  }
  j["failures"] = failures;
  return j.dump(2);
}

}  // namespace mrsla
