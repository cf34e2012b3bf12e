#pragma once

// Discrete problem of one step: find u in V with L(u, w) = N(w) for all w in V, where
//   L(u, w) = int tr(K[grad u] grad w^T) dx
//   N(w)    = int_{traction} f.w ds - int T0 : grad w dx + int rho g.w dx
// and V = {u . n = 0 on slip edges, u = 0 on clamped edges}, discretized with P1 triangles
// carrying one constant state per element.

#include <array>
#include <span>
#include <string>
#include <vector>

#include "mrsla/constitutive.hpp"
#include "mrsla/mesh.hpp"
#include "mrsla/sparse.hpp"

namespace mrsla {

enum class NodeConstraint { Free, Slip, Clamped };

/// What to do with a node where two non-parallel slip edges meet.
enum class SlipCornerPolicy {
  Error,  ///< raise CornerConflict (relabel the corner as clamped)
  Clamp,  ///< both normal components vanish, so treat the node as clamped
};

/// Per-node constraint kinds and the numbering of the remaining unknowns.
/// Free nodes carry (ux, uy); slip nodes carry the tangential component only.
struct DofMap {
  std::vector<NodeConstraint> kind;
  std::vector<Vec2> normal;    ///< unit normal for slip nodes, zero otherwise
  std::vector<int> first_dof;  ///< -1 for clamped nodes
  std::size_t dof_count = 0;

  /// Precedence clamped > slip > traction at nodes shared by differently labeled edges.
  static DofMap build(const Mesh& mesh, SlipCornerPolicy policy = SlipCornerPolicy::Error);

  std::size_t free_count() const;
  std::size_t slip_count() const;
  static Vec2 tangent_of(Vec2 n) { return {-n.y, n.x}; }
};

/// Unconstrained operator over all 2N nodal components (node-major: 2n, 2n+1).
struct RawSystem {
  CsrMatrix matrix;
  std::vector<double> rhs;
};

struct LinearSystem {
  CsrMatrix matrix;
  std::vector<double> rhs;
  DofMap dofs;
  std::vector<Vec2> lifted;  ///< prescribed nodal displacement on clamped nodes (zero elsewhere)
};

struct P1Geometry {
  double area = 0.0;
  std::array<Vec2, 3> grad{};  ///< gradients of the three barycentric shape functions
};

P1Geometry p1_geometry(const Mesh& mesh, std::size_t triangle);

/// 6x6 element matrix, row = test component (node*2+i), column = trial component.
/// w^T M u equals area * tr(K[H] W^T) for H = grad u, W = grad w.
std::array<double, 36> element_matrix(const P1Geometry& geo, const QuadPointState& state, double beta,
                                      const MaterialParams& params);

/// Assembles L and N over every node. `tractions` holds one vector per boundary edge (only
/// traction edges are used) or is empty for zero traction. Throws InconsistentState when the
/// state count differs from the triangle count.
RawSystem assemble_raw(const Mesh& mesh, std::span<const QuadPointState> states, double beta,
                       const MaterialParams& params, std::span<const Vec2> tractions, bool gravity_on);

/// Restricts the raw system to the admissible space: slip nodes are rotated to (normal,
/// tangent) and the normal component dropped, clamped nodes are eliminated with their
/// prescribed values (`prescribed`, per node, may be empty) moved to the right-hand side.
LinearSystem apply_constraints(const RawSystem& raw, const DofMap& dofs, std::span<const Vec2> prescribed = {});

LinearSystem assemble(const Mesh& mesh, std::span<const QuadPointState> states, double beta,
                      const MaterialParams& params, std::span<const Vec2> tractions, bool gravity_on,
                      const DofMap& dofs, std::span<const Vec2> prescribed = {});

/// Full nodal displacement from constrained unknowns.
std::vector<Vec2> expand_solution(const DofMap& dofs, std::span<const double> x, std::span<const Vec2> lifted);

/// Constrained unknowns of a full nodal field (tangential projection at slip nodes).
std::vector<double> restrict_field(const DofMap& dofs, std::span<const Vec2> u);

enum class SolverMethod { Lu, Gmres, Cgnr };

const char* to_string(SolverMethod method);
SolverMethod solver_method_from_string(const std::string& name);

struct SolveOptions {
  double tol = 1e-10;
  int max_iter = 5000;
  SolverMethod method = SolverMethod::Lu;
};

struct Solution {
  std::vector<Vec2> displacement;
  std::vector<double> dofs;
  double residual = 0.0;
  int iterations = 0;
  SolverMethod method = SolverMethod::Lu;
};

/// Solves the constrained system to relative residual `tol`. LU is tried first (with a few
/// refinement sweeps) and falls back to GMRES. Throws SolverStagnation when nothing converges.
Solution solve(const LinearSystem& system, const SolveOptions& options = {});

/// Constant displacement gradient per element.
std::vector<Tensor2> element_gradients(const Mesh& mesh, std::span<const Vec2> displacement);

}  // namespace mrsla
