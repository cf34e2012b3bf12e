#pragma once

// JSON run configuration. Unknown keys anywhere are rejected so that typos cannot silently
// fall back to defaults.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mrsla/assembly.hpp"
#include "mrsla/constitutive.hpp"
#include "mrsla/mesh.hpp"

namespace mrsla {

struct MaterialConfig {
  double s1 = 1.0;
  double s2 = 0.0;
  double beta = 1e3;
  double rho0 = 1.0;
  std::optional<double> p0_initial;  ///< default s1 + s2 (stress free at F = I)
  Tensor2 F_initial = Tensor2::identity();

  double initial_pressure() const { return p0_initial.value_or(s1 + s2); }
};

/// Axis-aligned box in initial coordinates; missing bounds are unbounded.
struct Region {
  double xmin = -1e300;
  double xmax = 1e300;
  double ymin = -1e300;
  double ymax = 1e300;

  /// Inclusive test with an absolute slack of 1e-9.
  bool contains(Vec2 p) const;
};

struct MeshConfig {
  std::optional<std::filesystem::path> path;  ///< relative paths resolve against the config file directory
  std::optional<RectangleSpec> rectangle;
};

struct ScheduleConfig {
  int total_steps = 1;
  std::vector<double> ramp;  ///< cumulative amplitude after each step; empty means i / total_steps
  std::string scenario = "custom";
  bool gravity = false;

  /// Cumulative amplitude after `step` steps (0 <= step <= total_steps).
  double amplitude(int step) const;
};

struct TractionRule {
  Region region;  ///< matched against edge midpoints
  Vec2 value;     ///< final traction, scaled by the ramp
};

struct PrescribedRule {
  Region region;      ///< matched against clamped nodes
  Vec2 displacement;  ///< total displacement reached at the end of the schedule
  Tensor2 gradient;   ///< optional affine part: u = displacement + gradient * X (initial X)

  Vec2 at(Vec2 X) const { return displacement + gradient * X; }
};

struct BoundaryConfig {
  std::vector<TractionRule> traction;
  std::vector<PrescribedRule> prescribed;
  bool allow_empty_clamped = false;
  SlipCornerPolicy slip_corners = SlipCornerPolicy::Error;
};

struct SolverConfig {
  double tol = 1e-10;
  int max_iter = 5000;
  SolverMethod method = SolverMethod::Lu;
  double step_guard = 0.2;  ///< largest accepted max-norm of a step gradient
};

enum class GateMode { Off, Warn, Strict };

const char* to_string(GateMode mode);

struct CertificationConfig {
  GateMode mode = GateMode::Warn;
  std::optional<double> alpha;  ///< default 0.9 alpha_max
  std::optional<double> k;      ///< default default_k(params)
  double beta_max = 1e8;
};

struct OutputConfig {
  std::filesystem::path dir;  ///< empty disables all file output
  int vtk_every = 0;          ///< 0 disables snapshots
  int csv_every = 1;          ///< 0 writes only the final step
};

struct RunConfig {
  MaterialConfig material;
  Vec2 gravity;
  MeshConfig mesh;
  ScheduleConfig schedule;
  BoundaryConfig boundary;
  SolverConfig solver;
  CertificationConfig certification;
  OutputConfig output;

  MaterialParams params() const;  ///< throws InvalidMaterial
  Mesh build_mesh() const;        ///< loads or generates, then validates
};

/// Parses and validates a configuration. Relative paths are resolved against `base_dir`.
/// Throws Config (or InvalidMaterial) with the offending key in the message.
RunConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

BoundaryKind boundary_kind_from_string(const std::string& name);

}  // namespace mrsla
