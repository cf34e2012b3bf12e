#include "mrsla/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "json.hpp"
#include "mrsla/errors.hpp"

namespace mrsla {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw Error(ErrorKind::Config, where + ": " + what);
}

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(where, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) fail(where, "unknown key '" + it.key() + "'");
  }
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(where, "must be finite");
  return v;
}

int integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(where, "expected an integer");
  return j.get<int>();
}

bool boolean(const json& j, const std::string& where) {
  if (!j.is_boolean()) fail(where, "expected true or false");
  return j.get<bool>();
}

std::string string(const json& j, const std::string& where) {
  if (!j.is_string()) fail(where, "expected a string");
  return j.get<std::string>();
}

Vec2 vec2(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) fail(where, "expected [x, y]");
  return {number(j[0], where + "[0]"), number(j[1], where + "[1]")};
}

Tensor2 tensor(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_array() || !j[1].is_array() || j[0].size() != 2 || j[1].size() != 2) {
    fail(where, "expected [[a, b], [c, d]]");
  }
  return {number(j[0][0], where), number(j[0][1], where), number(j[1][0], where), number(j[1][1], where)};
}

template <class F>
void optional_field(const json& j, const char* key, F&& apply) {
  const auto it = j.find(key);
  if (it != j.end() && !it->is_null()) apply(*it);
}

Region parse_region(const json& j, const std::string& where) {
  check_keys(j, where, {"x", "y"});
  Region r;
  optional_field(j, "x", [&](const json& v) {
    const Vec2 b = vec2(v, where + ".x");
    r.xmin = b.x;
    r.xmax = b.y;
  });
  optional_field(j, "y", [&](const json& v) {
    const Vec2 b = vec2(v, where + ".y");
    r.ymin = b.x;
    r.ymax = b.y;
  });
  if (r.xmin > r.xmax || r.ymin > r.ymax) fail(where, "empty region");
  return r;
}

void parse_material(const json& j, MaterialConfig& m) {
  check_keys(j, "material", {"s1", "s2", "beta", "rho0", "p0_initial", "F_initial"});
  for (const char* key : {"s1", "s2", "beta"}) {
    if (!j.contains(key)) fail("material", std::string("missing '") + key + "'");
  }
  m.s1 = number(j["s1"], "material.s1");
  m.s2 = number(j["s2"], "material.s2");
  m.beta = number(j["beta"], "material.beta");
  optional_field(j, "rho0", [&](const json& v) { m.rho0 = number(v, "material.rho0"); });
  optional_field(j, "p0_initial", [&](const json& v) { m.p0_initial = number(v, "material.p0_initial"); });
  optional_field(j, "F_initial", [&](const json& v) { m.F_initial = tensor(v, "material.F_initial"); });
  if (!(det(m.F_initial) > 0.0)) fail("material.F_initial", "det F must be positive");
}

void parse_mesh(const json& j, MeshConfig& m, const std::filesystem::path& base_dir) {
  check_keys(j, "mesh", {"path", "generator", "width", "height", "nx", "ny", "crossed", "origin", "labels"});
  const bool has_path = j.contains("path");
  const bool has_gen = j.contains("generator");
  if (has_path == has_gen) fail("mesh", "give exactly one of 'path' and 'generator'");
  if (has_path) {
    for (const char* key : {"width", "height", "nx", "ny", "crossed", "origin", "labels"}) {
      if (j.contains(key)) fail("mesh", std::string("'") + key + "' only applies to generated meshes");
    }
    std::filesystem::path p = string(j["path"], "mesh.path");
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    m.path = p;
    return;
  }
  if (string(j["generator"], "mesh.generator") != "rectangle") fail("mesh.generator", "only 'rectangle' is supported");
  RectangleSpec r;
  optional_field(j, "width", [&](const json& v) { r.width = number(v, "mesh.width"); });
  optional_field(j, "height", [&](const json& v) { r.height = number(v, "mesh.height"); });
  optional_field(j, "nx", [&](const json& v) { r.nx = integer(v, "mesh.nx"); });
  optional_field(j, "ny", [&](const json& v) { r.ny = integer(v, "mesh.ny"); });
  optional_field(j, "crossed", [&](const json& v) { r.crossed = boolean(v, "mesh.crossed"); });
  optional_field(j, "origin", [&](const json& v) { r.origin = vec2(v, "mesh.origin"); });
  optional_field(j, "labels", [&](const json& v) {
    check_keys(v, "mesh.labels", {"bottom", "right", "top", "left"});
    optional_field(v, "bottom", [&](const json& s) { r.bottom = boundary_kind_from_string(string(s, "mesh.labels.bottom")); });
    optional_field(v, "right", [&](const json& s) { r.right = boundary_kind_from_string(string(s, "mesh.labels.right")); });
    optional_field(v, "top", [&](const json& s) { r.top = boundary_kind_from_string(string(s, "mesh.labels.top")); });
    optional_field(v, "left", [&](const json& s) { r.left = boundary_kind_from_string(string(s, "mesh.labels.left")); });
  });
  if (!(r.width > 0.0) || !(r.height > 0.0)) fail("mesh", "width and height must be positive");
  if (r.nx < 1 || r.ny < 1) fail("mesh", "nx and ny must be at least 1");
  m.rectangle = r;
}

void parse_schedule(const json& j, ScheduleConfig& s) {
  check_keys(j, "schedule", {"total_steps", "ramp", "scenario", "gravity"});
  optional_field(j, "total_steps", [&](const json& v) { s.total_steps = integer(v, "schedule.total_steps"); });
  if (s.total_steps < 1) fail("schedule.total_steps", "must be at least 1");
  optional_field(j, "ramp", [&](const json& v) {
    if (!v.is_array()) fail("schedule.ramp", "expected an array");
    for (std::size_t i = 0; i < v.size(); ++i) s.ramp.push_back(number(v[i], "schedule.ramp[" + std::to_string(i) + "]"));
    if (s.ramp.size() != static_cast<std::size_t>(s.total_steps)) {
      fail("schedule.ramp", "needs one amplitude per step (" + std::to_string(s.total_steps) + ")");
    }
  });
  optional_field(j, "scenario", [&](const json& v) { s.scenario = string(v, "schedule.scenario"); });
  optional_field(j, "gravity", [&](const json& v) { s.gravity = boolean(v, "schedule.gravity"); });
}

void parse_boundary(const json& j, BoundaryConfig& b) {
  check_keys(j, "boundary", {"traction", "prescribed", "allow_empty_clamped", "slip_corners"});
  optional_field(j, "traction", [&](const json& v) {
    if (!v.is_array()) fail("boundary.traction", "expected an array");
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string where = "boundary.traction[" + std::to_string(i) + "]";
      check_keys(v[i], where, {"region", "value"});
      if (!v[i].contains("value")) fail(where, "missing 'value'");
      TractionRule r;
      optional_field(v[i], "region", [&](const json& g) { r.region = parse_region(g, where + ".region"); });
      r.value = vec2(v[i]["value"], where + ".value");
      b.traction.push_back(r);
    }
  });
  optional_field(j, "prescribed", [&](const json& v) {
    if (!v.is_array()) fail("boundary.prescribed", "expected an array");
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string where = "boundary.prescribed[" + std::to_string(i) + "]";
      check_keys(v[i], where, {"region", "displacement", "gradient"});
      if (!v[i].contains("displacement") && !v[i].contains("gradient")) {
        fail(where, "needs 'displacement' and/or 'gradient'");
      }
      PrescribedRule r;
      optional_field(v[i], "region", [&](const json& g) { r.region = parse_region(g, where + ".region"); });
      optional_field(v[i], "displacement", [&](const json& g) { r.displacement = vec2(g, where + ".displacement"); });
      optional_field(v[i], "gradient", [&](const json& g) { r.gradient = tensor(g, where + ".gradient"); });
      b.prescribed.push_back(r);
    }
  });
  optional_field(j, "allow_empty_clamped",
                 [&](const json& v) { b.allow_empty_clamped = boolean(v, "boundary.allow_empty_clamped"); });
  optional_field(j, "slip_corners", [&](const json& v) {
    const std::string s = string(v, "boundary.slip_corners");
    if (s == "error") {
      b.slip_corners = SlipCornerPolicy::Error;
    } else if (s == "clamp") {
      b.slip_corners = SlipCornerPolicy::Clamp;
    } else {
      fail("boundary.slip_corners", "expected 'error' or 'clamp'");
    }
  });
}

void parse_solver(const json& j, SolverConfig& s) {
  check_keys(j, "solver", {"tol", "max_iter", "method", "step_guard"});
  optional_field(j, "tol", [&](const json& v) { s.tol = number(v, "solver.tol"); });
  if (!(s.tol > 0.0 && s.tol < 1.0)) fail("solver.tol", "must lie in (0, 1)");
  optional_field(j, "max_iter", [&](const json& v) { s.max_iter = integer(v, "solver.max_iter"); });
  if (s.max_iter < 1) fail("solver.max_iter", "must be at least 1");
  optional_field(j, "method", [&](const json& v) {
    try {
      s.method = solver_method_from_string(string(v, "solver.method"));
    } catch (const Error& e) {
      fail("solver.method", e.what());
    }
  });
  optional_field(j, "step_guard", [&](const json& v) { s.step_guard = number(v, "solver.step_guard"); });
  if (!(s.step_guard > 0.0)) fail("solver.step_guard", "must be positive");
}

void parse_certification(const json& j, CertificationConfig& c) {
  check_keys(j, "certification", {"mode", "alpha", "k", "beta_max"});
  optional_field(j, "mode", [&](const json& v) {
    const std::string s = string(v, "certification.mode");
    if (s == "off") {
      c.mode = GateMode::Off;
    } else if (s == "warn") {
      c.mode = GateMode::Warn;
    } else if (s == "strict") {
      c.mode = GateMode::Strict;
    } else {
      fail("certification.mode", "expected off, warn or strict");
    }
  });
  optional_field(j, "alpha", [&](const json& v) { c.alpha = number(v, "certification.alpha"); });
  optional_field(j, "k", [&](const json& v) { c.k = number(v, "certification.k"); });
  optional_field(j, "beta_max", [&](const json& v) { c.beta_max = number(v, "certification.beta_max"); });
  if (c.alpha && !(*c.alpha > 0.0)) fail("certification.alpha", "must be positive");
  if (c.k && !(*c.k > 0.0)) fail("certification.k", "must be positive");
  if (!(c.beta_max > 0.0)) fail("certification.beta_max", "must be positive");
}

// output.dir stays relative to the working directory
void parse_output(const json& j, OutputConfig& o) {
  check_keys(j, "output", {"dir", "vtk_every", "csv_every"});
  optional_field(j, "dir", [&](const json& v) { o.dir = string(v, "output.dir"); });
  optional_field(j, "vtk_every", [&](const json& v) { o.vtk_every = integer(v, "output.vtk_every"); });
  optional_field(j, "csv_every", [&](const json& v) { o.csv_every = integer(v, "output.csv_every"); });
  if (o.vtk_every < 0 || o.csv_every < 0) fail("output", "vtk_every and csv_every must be non-negative");
}

}  // namespace

bool Region::contains(Vec2 p) const {
  constexpr double slack = 1e-9;
  return p.x >= xmin - slack && p.x <= xmax + slack && p.y >= ymin - slack && p.y <= ymax + slack;
}

double ScheduleConfig::amplitude(int step) const {
  if (step <= 0) return 0.0;
  if (!ramp.empty()) return ramp[static_cast<std::size_t>(std::min(step, total_steps) - 1)];
  return static_cast<double>(std::min(step, total_steps)) / static_cast<double>(total_steps);
}

const char* to_string(GateMode mode) {
  switch (mode) {
    case GateMode::Off:
      return "off";
    case GateMode::Warn:
      return "warn";
    case GateMode::Strict:
      return "strict";
  }
  return "?";
}

BoundaryKind boundary_kind_from_string(const std::string& name) {
  if (name == "traction") return BoundaryKind::Traction;
  if (name == "slip") return BoundaryKind::Slip;
  if (name == "clamped") return BoundaryKind::Clamped;
  throw Error(ErrorKind::Config, "unknown boundary kind '" + name + "' (traction, slip, clamped)");
}

MaterialParams RunConfig::params() const {
  return {material.s1, material.s2, material.beta, material.rho0, gravity};
}

Mesh RunConfig::build_mesh() const {
  MeshOptions opts;
  opts.allow_empty_clamped = boundary.allow_empty_clamped;
  if (mesh.path) return load_mesh(*mesh.path, opts);
  Mesh m = rectangle_mesh(*mesh.rectangle);
  validate_mesh(m, opts);
  return m;
}

RunConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Config, std::string("malformed JSON: ") + e.what());
  }
  check_keys(j, "config",
             {"material", "gravity", "mesh", "schedule", "boundary", "solver", "certification", "output"});
  RunConfig c;
  if (!j.contains("material")) fail("config", "missing 'material'");
  if (!j.contains("mesh")) fail("config", "missing 'mesh'");
  parse_material(j["material"], c.material);
  optional_field(j, "gravity", [&](const json& v) { c.gravity = vec2(v, "gravity"); });
  parse_mesh(j["mesh"], c.mesh, base_dir);
  optional_field(j, "schedule", [&](const json& v) { parse_schedule(v, c.schedule); });
  optional_field(j, "boundary", [&](const json& v) { parse_boundary(v, c.boundary); });
  optional_field(j, "solver", [&](const json& v) { parse_solver(v, c.solver); });
  optional_field(j, "certification", [&](const json& v) { parse_certification(v, c.certification); });
  optional_field(j, "output", [&](const json& v) { parse_output(v, c.output); });
  (void)c.params();  // material condition, reported as InvalidMaterial
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

}  // namespace mrsla
