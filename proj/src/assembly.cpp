#include "mrsla/assembly.hpp"

#include <algorithm>
#include <cmath>

#include "mrsla/errors.hpp"

namespace mrsla {

namespace {

constexpr double kParallelTol = 1e-10;
constexpr int kRefinementSweeps = 3;

struct Weighted {
  int dof;
  double weight;
};

// Constrained unknowns feeding full component 2*node + comp.
int component_terms(const DofMap& dofs, std::size_t full, std::array<Weighted, 1>& out) {
  const std::size_t node = full / 2;
  const int comp = static_cast<int>(full % 2);
  switch (dofs.kind[node]) {
    case NodeConstraint::Free:
      out[0] = {dofs.first_dof[node] + comp, 1.0};
      return 1;
    case NodeConstraint::Slip: {
      const Vec2 t = DofMap::tangent_of(dofs.normal[node]);
      out[0] = {dofs.first_dof[node], t[comp]};
      return 1;
    }
    case NodeConstraint::Clamped:
      return 0;
  }
  return 0;
}

}  // namespace

DofMap DofMap::build(const Mesh& mesh, SlipCornerPolicy policy) {
  const std::size_t n = mesh.nodes.size();
  DofMap map;
  map.kind.assign(n, NodeConstraint::Free);
  map.normal.assign(n, Vec2{});
  map.first_dof.assign(n, -1);

  std::vector<std::vector<Vec2>> slip_normals(n);
  std::vector<bool> clamped(n, false);
  for (const auto& e : mesh.boundary_edges) {
    if (e.kind == BoundaryKind::Clamped) {
      clamped[static_cast<std::size_t>(e.a)] = clamped[static_cast<std::size_t>(e.b)] = true;
    } else if (e.kind == BoundaryKind::Slip) {
      const Vec2 nrm = edge_normal(mesh, e);
      slip_normals[static_cast<std::size_t>(e.a)].push_back(nrm);
      slip_normals[static_cast<std::size_t>(e.b)].push_back(nrm);
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (clamped[i]) {
      map.kind[i] = NodeConstraint::Clamped;
      continue;
    }
    const auto& normals = slip_normals[i];
    if (normals.empty()) continue;
    const Vec2 n0 = normals.front();
    bool conflict = false;
    for (const Vec2& other : normals) {
      if (std::abs(cross(n0, other)) > kParallelTol || dot(n0, other) < 0.0) conflict = true;
    }
    if (conflict) {
      if (policy == SlipCornerPolicy::Error) {
        throw Error(ErrorKind::CornerConflict,
                    "node " + std::to_string(i) + " joins slip edges with normals (" + format_double(n0.x) + ", " +
                        format_double(n0.y) + ") and a non-parallel one; label the corner as clamped");
      }
      map.kind[i] = NodeConstraint::Clamped;
      continue;
    }
    map.kind[i] = NodeConstraint::Slip;
    map.normal[i] = n0;
  }

  int next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (map.kind[i] == NodeConstraint::Free) {
      map.first_dof[i] = next;
      next += 2;
    } else if (map.kind[i] == NodeConstraint::Slip) {
      map.first_dof[i] = next;
      next += 1;
    }
  }
  map.dof_count = static_cast<std::size_t>(next);
  return map;
}

std::size_t DofMap::free_count() const {
  return static_cast<std::size_t>(std::count(kind.begin(), kind.end(), NodeConstraint::Free));
}

std::size_t DofMap::slip_count() const {
  return static_cast<std::size_t>(std::count(kind.begin(), kind.end(), NodeConstraint::Slip));
}

P1Geometry p1_geometry(const Mesh& mesh, std::size_t triangle) {
  const auto& t = mesh.triangles[triangle];
  const Vec2 p0 = mesh.nodes[static_cast<std::size_t>(t[0])];
  const Vec2 p1 = mesh.nodes[static_cast<std::size_t>(t[1])];
  const Vec2 p2 = mesh.nodes[static_cast<std::size_t>(t[2])];
  P1Geometry g;
  const double twice = cross(p1 - p0, p2 - p0);
  g.area = 0.5 * twice;
  if (!(g.area > 0.0)) {
    throw Error(ErrorKind::MeshValidation, "triangle " + std::to_string(triangle) + " has non-positive area");
  }
  g.grad[0] = {(p1.y - p2.y) / twice, (p2.x - p1.x) / twice};
  g.grad[1] = {(p2.y - p0.y) / twice, (p0.x - p2.x) / twice};
  g.grad[2] = {(p0.y - p1.y) / twice, (p1.x - p0.x) / twice};
  return g;
}

std::array<double, 36> element_matrix(const P1Geometry& geo, const QuadPointState& state, double beta,
                                      const MaterialParams& params) {
  std::array<double, 36> m{};
  for (int a = 0; a < 3; ++a) {
    for (int k = 0; k < 2; ++k) {
      // trial function e_k phi_a has gradient e_k (x) grad phi_a
      const Vec2 ek = k == 0 ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0};
      const Tensor2 K = tangent(Tensor2::outer(ek, geo.grad[static_cast<std::size_t>(a)]), state.B0, state.T0, beta, params);
      const int col = 2 * a + k;
      for (int b = 0; b < 3; ++b) {
        const Vec2 gb = geo.grad[static_cast<std::size_t>(b)];
        for (int i = 0; i < 2; ++i) {
          m[static_cast<std::size_t>((2 * b + i) * 6 + col)] = geo.area * (K(i, 0) * gb.x + K(i, 1) * gb.y);
        }
      }
    }
  }
  return m;
}

RawSystem assemble_raw(const Mesh& mesh, std::span<const QuadPointState> states, double beta,
                       const MaterialParams& params, std::span<const Vec2> tractions, bool gravity_on) {
  if (states.size() != mesh.triangles.size()) {
    throw Error(ErrorKind::InconsistentState, "got " + std::to_string(states.size()) + " element states for " +
                                                  std::to_string(mesh.triangles.size()) + " triangles");
  }
  if (!tractions.empty() && tractions.size() != mesh.boundary_edges.size()) {
    throw Error(ErrorKind::InconsistentState, "traction list must have one entry per boundary edge");
  }
  const std::size_t n = 2 * mesh.nodes.size();
  RawSystem raw;
  raw.rhs.assign(n, 0.0);
  TripletBuilder trips;
  trips.reserve(36 * mesh.triangles.size());

  const Vec2 g = params.gravity();
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const P1Geometry geo = p1_geometry(mesh, t);
    const auto& tri = mesh.triangles[t];
    const auto& st = states[t];
    const auto m = element_matrix(geo, st, beta, params);
    for (int r = 0; r < 6; ++r) {
      const int gr = 2 * tri[static_cast<std::size_t>(r / 2)] + r % 2;
      for (int c = 0; c < 6; ++c) {
        trips.add(gr, 2 * tri[static_cast<std::size_t>(c / 2)] + c % 2, m[static_cast<std::size_t>(r * 6 + c)]);
      }
    }
    for (int b = 0; b < 3; ++b) {
      const Vec2 gb = geo.grad[static_cast<std::size_t>(b)];
      const std::size_t node = static_cast<std::size_t>(tri[static_cast<std::size_t>(b)]);
      for (int i = 0; i < 2; ++i) {
        double v = -geo.area * (st.T0(i, 0) * gb.x + st.T0(i, 1) * gb.y);
        // one third of the area per vertex integrates rho g phi_b exactly
        if (gravity_on) v += st.rho * g[i] * geo.area / 3.0;
        raw.rhs[2 * node + static_cast<std::size_t>(i)] += v;
      }
    }
  }

  if (!tractions.empty()) {
    // two-point Gauss rule on each edge
    const double q = 0.5 / std::sqrt(3.0);
    const std::array<double, 2> xi{0.5 - q, 0.5 + q};
    for (std::size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
      const auto& edge = mesh.boundary_edges[e];
      if (edge.kind != BoundaryKind::Traction) continue;
      const Vec2 f = tractions[e];
      const double len = edge_length(mesh, edge);
      for (double s : xi) {
        const double wa = (1.0 - s) * 0.5 * len;
        const double wb = s * 0.5 * len;
        for (int i = 0; i < 2; ++i) {
          raw.rhs[2 * static_cast<std::size_t>(edge.a) + static_cast<std::size_t>(i)] += wa * f[i];
          raw.rhs[2 * static_cast<std::size_t>(edge.b) + static_cast<std::size_t>(i)] += wb * f[i];
        }
      }
    }
  }
  raw.matrix = trips.build(n, n);
  return raw;
}

LinearSystem apply_constraints(const RawSystem& raw, const DofMap& dofs, std::span<const Vec2> prescribed) {
  const std::size_t n_full = raw.rhs.size();
  if (dofs.kind.size() * 2 != n_full) throw Error(ErrorKind::InconsistentState, "dof map does not match the system");
  if (!prescribed.empty() && prescribed.size() * 2 != n_full) {
    throw Error(ErrorKind::InconsistentState, "prescribed displacement must have one entry per node");
  }
  LinearSystem sys;
  sys.dofs = dofs;
  sys.lifted.assign(dofs.kind.size(), Vec2{});
  std::vector<double> lift(n_full, 0.0);
  if (!prescribed.empty()) {
    for (std::size_t i = 0; i < dofs.kind.size(); ++i) {
      if (dofs.kind[i] == NodeConstraint::Clamped) {
        sys.lifted[i] = prescribed[i];
        lift[2 * i] = prescribed[i].x;
        lift[2 * i + 1] = prescribed[i].y;
      }
    }
  }
  const std::vector<double> Ag = raw.matrix.multiply(lift);

  sys.rhs.assign(dofs.dof_count, 0.0);
  TripletBuilder trips;
  trips.reserve(raw.matrix.nonzeros());
  std::array<Weighted, 1> rt{}, ct{};
  for (std::size_t r = 0; r < n_full; ++r) {
    if (component_terms(dofs, r, rt) == 0) continue;
    sys.rhs[static_cast<std::size_t>(rt[0].dof)] += rt[0].weight * (raw.rhs[r] - Ag[r]);
    for (std::size_t k = raw.matrix.row_ptr[r]; k < raw.matrix.row_ptr[r + 1]; ++k) {
      if (component_terms(dofs, static_cast<std::size_t>(raw.matrix.col[k]), ct) == 0) continue;
      trips.add(rt[0].dof, ct[0].dof, rt[0].weight * ct[0].weight * raw.matrix.val[k]);
    }
  }
  sys.matrix = trips.build(dofs.dof_count, dofs.dof_count);
  return sys;
}

LinearSystem assemble(const Mesh& mesh, std::span<const QuadPointState> states, double beta,
                      const MaterialParams& params, std::span<const Vec2> tractions, bool gravity_on,
                      const DofMap& dofs, std::span<const Vec2> prescribed) {
  return apply_constraints(assemble_raw(mesh, states, beta, params, tractions, gravity_on), dofs, prescribed);
}

std::vector<Vec2> expand_solution(const DofMap& dofs, std::span<const double> x, std::span<const Vec2> lifted) {
  std::vector<Vec2> u(dofs.kind.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    switch (dofs.kind[i]) {
      case NodeConstraint::Free:
        u[i] = {x[static_cast<std::size_t>(dofs.first_dof[i])], x[static_cast<std::size_t>(dofs.first_dof[i]) + 1]};
        break;
      case NodeConstraint::Slip:
        u[i] = x[static_cast<std::size_t>(dofs.first_dof[i])] * DofMap::tangent_of(dofs.normal[i]);
        break;
      case NodeConstraint::Clamped:
        u[i] = lifted.empty() ? Vec2{} : lifted[i];
        break;
    }
  }
  return u;
}

std::vector<double> restrict_field(const DofMap& dofs, std::span<const Vec2> u) {
  std::vector<double> x(dofs.dof_count, 0.0);
  for (std::size_t i = 0; i < dofs.kind.size(); ++i) {
    if (dofs.kind[i] == NodeConstraint::Free) {
      x[static_cast<std::size_t>(dofs.first_dof[i])] = u[i].x;
      x[static_cast<std::size_t>(dofs.first_dof[i]) + 1] = u[i].y;
    } else if (dofs.kind[i] == NodeConstraint::Slip) {
      x[static_cast<std::size_t>(dofs.first_dof[i])] = dot(u[i], DofMap::tangent_of(dofs.normal[i]));
    }
  }
  return x;
}

const char* to_string(SolverMethod method) {
  switch (method) {
    case SolverMethod::Lu: return "lu";
    case SolverMethod::Gmres: return "gmres";
    case SolverMethod::Cgnr: return "cgnr";
  }
  return "unknown";
}

SolverMethod solver_method_from_string(const std::string& name) {
  if (name == "lu") return SolverMethod::Lu;
  if (name == "gmres") return SolverMethod::Gmres;
  if (name == "cgnr") return SolverMethod::Cgnr;
  throw Error(ErrorKind::Config, "unknown solver method '" + name + "' (expected lu, gmres or cgnr)");
}

Solution solve(const LinearSystem& system, const SolveOptions& options) {
  if (!(options.tol > 0.0 && options.tol < 1.0)) throw Error(ErrorKind::InvalidArgument, "solver tolerance must lie in (0, 1)");
  const auto& A = system.matrix;
  const auto& b = system.rhs;
  Solution sol;
  sol.method = options.method;
  if (b.empty() || norm2(b) == 0.0) {
    sol.dofs.assign(b.size(), 0.0);
    sol.displacement = expand_solution(system.dofs, sol.dofs, system.lifted);
    return sol;
  }

  std::vector<double> x;
  bool ok = false;
  if (options.method == SolverMethod::Lu) {
    try {
      x = sparse_lu_solve(A, b);
      sol.residual = relative_residual(A, x, b);
      for (int sweep = 0; sweep < kRefinementSweeps && sol.residual > options.tol; ++sweep) {
        std::vector<double> r = A.multiply(x);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
        const std::vector<double> dx = sparse_lu_solve(A, r);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] += dx[i];
        sol.residual = relative_residual(A, x, b);
        ++sol.iterations;
      }
      ok = sol.residual <= options.tol;
    } catch (const Error&) {
      x.clear();
    }
  }
  if (!ok && options.method == SolverMethod::Cgnr) {
    auto it = cgnr(A, b, options.tol, options.max_iter);
    x = std::move(it.x);
    sol.residual = it.residual;
    sol.iterations = it.iterations;
    ok = it.converged;
  } else if (!ok) {
    auto it = gmres(A, b, options.tol, options.max_iter, 60, x);
    x = std::move(it.x);
    sol.residual = it.residual;
    sol.iterations += it.iterations;
    sol.method = SolverMethod::Gmres;
    ok = it.converged;
  }
  if (!ok) {
    throw Error(ErrorKind::SolverStagnation,
                "linear solver did not reach relative residual " + format_double(options.tol) + " (got " +
                    format_double(sol.residual) + "); the step operator may not be coercive, run `certify` on this state");
  }
  sol.dofs = std::move(x);
  sol.displacement = expand_solution(system.dofs, sol.dofs, system.lifted);
  return sol;
}

std::vector<Tensor2> element_gradients(const Mesh& mesh, std::span<const Vec2> displacement) {
  std::vector<Tensor2> H(mesh.triangles.size());
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const P1Geometry geo = p1_geometry(mesh, t);
    Tensor2 h;
    for (int a = 0; a < 3; ++a) {
      h += Tensor2::outer(displacement[static_cast<std::size_t>(mesh.triangles[t][static_cast<std::size_t>(a)])],
                          geo.grad[static_cast<std::size_t>(a)]);
    }
    H[t] = h;
  }
  return H;
}

}  // namespace mrsla
