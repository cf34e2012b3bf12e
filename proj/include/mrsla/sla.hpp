#pragma once

// Successive linear approximation: each step solves the linearized boundary-value problem
// about the current configuration, then advances the per-element states and moves the nodes.

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mrsla/assembly.hpp"
#include "mrsla/coercivity.hpp"
#include "mrsla/config.hpp"

namespace mrsla {

struct RunState {
  Mesh mesh;                   ///< current coordinates
  std::vector<Vec2> initial;   ///< node coordinates before the first step
  std::vector<QuadPointState> states;
  int step = 0;

  std::vector<Vec2> displacement() const;  ///< cumulative, current minus initial
};

/// Outcome of the certification gate at the start of a step.
struct GateRecord {
  bool admissible = false;
  bool covers_beta = false;
  std::optional<double> beta0;
  double alpha = 0.0;
  std::string first_failure;
};

struct DiagnosticsRecord {
  int step = 0;
  double amplitude = 0.0;
  double max_increment = 0.0;   ///< max over elements of the max-norm of H
  double density_drift = 0.0;   ///< mean |rho det F - rho0| / rho0
  double max_volume_change = 0.0;  ///< max |det F - 1|
  double min_margin = 0.0;      ///< smallest Sylvester quantity of A - alpha I at the run beta
  double solver_residual = 0.0;
  int solver_iterations = 0;
  SolverMethod solver = SolverMethod::Lu;
  double mean_shear_stress = 0.0;  ///< mean element T12
  std::optional<GateRecord> gate;
};

struct RunControl {
  bool record_increments = false;
  std::ostream* log = nullptr;  ///< warnings and progress; nullptr silences
};

struct RunResult {
  RunState state;
  std::vector<DiagnosticsRecord> steps;
  std::vector<std::vector<Tensor2>> increments;  ///< per step, per element (when recorded)
  std::vector<std::string> warnings;
};

/// Initial state from the configuration: mesh as given, F = F_initial, p = p0_initial.
RunState initial_state(const RunConfig& config);

/// Per-element spectral data for certification.
std::vector<SpectralState> spectral_points(const RunState& state, const MaterialParams& params);

/// Statistics of a completed step; the margin and gate fields are left for the caller.
DiagnosticsRecord step_diagnostics(const RunState& state, std::span<const Tensor2> increments,
                                   double solver_residual, const MaterialParams& params);

/// Runs the full schedule. Throws StepTooLarge, SolverStagnation, or (strict gate)
/// HypothesesViolated / BetaExceedsMax.
RunResult run(const RunConfig& config, const RunControl& control = {});
RunResult run(const RunConfig& config, RunState state, const RunControl& control = {});

/// Mean of T12 over elements.
double mean_shear_stress(const RunState& state);

std::string summary_json(const RunConfig& config, const RunResult& result);
std::string report_json(const CoercivityReport& report);

/// Per-element CSV: element,F11,F12,F21,F22,T11,T12,T21,T22,p,rho,detF.
void write_element_csv(const RunState& state, std::ostream& out);

}  // namespace mrsla
