#include "mrsla/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "mrsla/errors.hpp"

namespace mrsla::oracles {

ShearSolution pure_shear(double kappa, const MaterialParams& params) {
  ShearSolution s;
  s.kappa = kappa;
  s.F = {1.0, kappa, 0.0, 1.0};
  const double k2 = kappa * kappa;
  s.B = {1.0 + k2, kappa, kappa, 1.0};
  s.Binv = {1.0, -kappa, -kappa, 1.0 + k2};
  s.T12 = (params.s1() - params.s2()) * kappa;
  s.p_free = params.s1() + params.s2() * (1.0 + k2);
  return s;
}

namespace {

struct PointData {
  Tensor2 B0;
  Tensor2 B0inv;
  Tensor2 T0;
};

PointData point_data(double g1, double g2, double p0, const MaterialParams& params) {
  PointData d;
  d.B0 = Tensor2::diag(g1, g2);
  d.B0inv = Tensor2::diag(1.0 / g1, 1.0 / g2);
  d.T0 = Tensor2::diag(-p0 + params.s1() * g1 + params.s2() / g1, -p0 + params.s1() * g2 + params.s2() / g2);
  return d;
}

Tensor2 from_x(const std::array<double, 4>& x) {
  // X = (a, c, b, d), H = [[a, b + d], [b - d, c]]
  return {x[0], x[2] + x[3], x[2] - x[3], x[1]};
}

}  // namespace

double quadform_trace(const Tensor2& H, double gamma1, double gamma2, double p0, double beta,
                      const MaterialParams& params) {
  const PointData d = point_data(gamma1, gamma2, p0, params);
  const Tensor2 Ht = transpose(H);
  const Tensor2 I = Tensor2::identity();
  return trace(H) * trace((d.T0 + beta * I) * Ht) - trace(d.T0 * Ht * Ht) +
         params.s1() * trace((H * d.B0 + d.B0 * Ht) * Ht) - params.s2() * trace((d.B0inv * H + Ht * d.B0inv) * Ht);
}

double quadform_scale(const Tensor2& H, double gamma1, double gamma2, double p0, double beta,
                      const MaterialParams& params) {
  const PointData d = point_data(gamma1, gamma2, p0, params);
  const Tensor2 Ht = transpose(H);
  const Tensor2 I = Tensor2::identity();
  return std::abs(trace(H) * trace((d.T0 + beta * I) * Ht)) + std::abs(trace(d.T0 * Ht * Ht)) +
         std::abs(params.s1() * trace((H * d.B0 + d.B0 * Ht) * Ht)) +
         std::abs(params.s2() * trace((d.B0inv * H + Ht * d.B0inv) * Ht));
}

double quadform_blocks(const Tensor2& H, double gamma1, double gamma2, double p0, double beta,
                       const MaterialParams& params) {
  const double s1 = params.s1();
  const double s2 = params.s2();
  const double a = H(0, 0);
  const double c = H(1, 1);
  const double b = 0.5 * (H(0, 1) + H(1, 0));
  const double d = 0.5 * (H(0, 1) - H(1, 0));
  const double t1 = -p0 + s1 * gamma1 + s2 / gamma1;
  const double t2 = -p0 + s1 * gamma2 + s2 / gamma2;
  const double q1 = (a + c) * (a * t1 + c * t2) + beta * (a + c) * (a + c);
  const double q2 = -t1 * (a * a + b * b - d * d) - t2 * (b * b + c * c - d * d);
  const double q3 = 2.0 * s1 * (gamma1 * a * a + gamma2 * c * c + (gamma1 + gamma2) * b * b + (gamma2 - gamma1) * b * d);
  const double q4 = -2.0 * s2 *
                    (a * a / gamma1 + c * c / gamma2 + (1.0 / gamma1 + 1.0 / gamma2) * b * b +
                     (1.0 / gamma1 - 1.0 / gamma2) * b * d);
  return q1 + q2 + q3 + q4;
}

double relative_difference(double x, double y, double floor) {
  const double scale = std::max({std::abs(x), std::abs(y), floor});
  return scale > 0.0 ? std::abs(x - y) / scale : 0.0;
}

double quadform_trace_oracle(const Tensor2& H, double gamma1, double gamma2, double p0, double beta,
                             const MaterialParams& params, double tolerance) {
  const double direct = quadform_trace(H, gamma1, gamma2, p0, beta, params);
  const double blocks = quadform_blocks(H, gamma1, gamma2, p0, beta, params);
  const double scale = quadform_scale(H, gamma1, gamma2, p0, beta, params);
  if (relative_difference(direct, blocks, scale) > tolerance) {
    throw Error(ErrorKind::InternalInconsistency, "trace form " + format_double(direct) + " and block form " +
                                                      format_double(blocks) + " disagree");
  }
  return direct;
}

Matrix4 quadform_matrix(double gamma1, double gamma2, double p0, double beta, const MaterialParams& params) {
  auto Q = [&](const std::array<double, 4>& x) {
    return quadform_trace(from_x(x), gamma1, gamma2, p0, beta, params);
  };
  Matrix4 m{};
  std::array<double, 4> diag{};
  for (int i = 0; i < 4; ++i) {
    std::array<double, 4> e{};
    e[static_cast<std::size_t>(i)] = 1.0;
    diag[static_cast<std::size_t>(i)] = Q(e);
    m[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = diag[static_cast<std::size_t>(i)];
  }
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      std::array<double, 4> e{};
      e[static_cast<std::size_t>(i)] = 1.0;
      e[static_cast<std::size_t>(j)] = 1.0;
      const double v = 0.5 * (Q(e) - diag[static_cast<std::size_t>(i)] - diag[static_cast<std::size_t>(j)]);
      m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = v;
      m[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = v;
    }
  }
  return m;
}

std::array<double, 4> jacobi_eigenvalues(Matrix4 m) {
  auto frob = [&m] {
    double s = 0.0;
    for (const auto& row : m)
      for (double v : row) s += v * v;
    return std::sqrt(s);
  };
  auto off = [&m] {
    double s = 0.0;
    for (int p = 0; p < 4; ++p)
      for (int q = 0; q < 4; ++q)
        if (p != q) s += m[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)] * m[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)];
    return std::sqrt(s);
  };
  const double scale = frob();
  for (int sweep = 0; sweep < 100 && off() > 1e-14 * scale; ++sweep) {
    for (std::size_t p = 0; p < 3; ++p) {
      for (std::size_t q = p + 1; q < 4; ++q) {
        const double apq = m[p][q];
        if (apq == 0.0) continue;
        const double theta = (m[q][q] - m[p][p]) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < 4; ++k) {
          const double mkp = m[k][p];
          const double mkq = m[k][q];
          m[k][p] = c * mkp - s * mkq;
          m[k][q] = s * mkp + c * mkq;
        }
        for (std::size_t k = 0; k < 4; ++k) {
          const double mpk = m[p][k];
          const double mqk = m[q][k];
          m[p][k] = c * mpk - s * mqk;
          m[q][k] = s * mpk + c * mqk;
        }
      }
    }
  }
  std::array<double, 4> ev{m[0][0], m[1][1], m[2][2], m[3][3]};
  std::sort(ev.begin(), ev.end());
  return ev;
}

double min_eigenvalue(const CoercivityMatrix& A, double alpha) {
  Matrix4 m = A.dense();
  for (std::size_t i = 0; i < 4; ++i) m[i][i] -= alpha;
  return jacobi_eigenvalues(m)[0];
}

bool psd_eigen(const CoercivityMatrix& A, double alpha, double tie_tolerance) {
  return min_eigenvalue(A, alpha) >= -tie_tolerance;
}

Tensor2 patch_gradient(double traction, double beta, const MaterialParams& params) {
  // unknowns (H11, H12, H21, H22); with B0 = I and T0 = 0,
  // K[H] = beta tr(H) I + (s1 - s2)(H + H^T)
  const double mu = params.s1() - params.s2();
  std::array<std::array<double, 5>, 4> m{{
      {beta + 2.0 * mu, 0.0, 0.0, beta, traction},  // K11 = t
      {0.0, mu, mu, 0.0, 0.0},                      // K12 = 0
      {beta, 0.0, 0.0, beta + 2.0 * mu, 0.0},       // K22 = 0
      {0.0, 1.0, 0.0, 0.0, 0.0},                    // ux constant along the left edge
  }};
  for (std::size_t col = 0; col < 4; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < 4; ++r) {
      if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
    }
    if (m[piv][col] == 0.0) throw Error(ErrorKind::InternalInconsistency, "patch oracle system is singular");
    std::swap(m[col], m[piv]);
    for (std::size_t r = 0; r < 4; ++r) {
      if (r == col) continue;
      const double f = m[r][col] / m[col][col];
      for (std::size_t k = col; k < 5; ++k) m[r][k] -= f * m[col][k];
    }
  }
  return {m[0][4] / m[0][0], m[1][4] / m[1][1], m[2][4] / m[2][2], m[3][4] / m[3][3]};
}

double traction_residual(const Mesh& mesh, std::span<const QuadPointState> states, std::span<const Vec2> u,
                         std::span<const Vec2> tractions, double beta, const MaterialParams& params) {
  double total = 0.0;
  for (std::size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
    const auto& edge = mesh.boundary_edges[e];
    if (edge.kind != BoundaryKind::Traction) continue;
    const std::size_t t = static_cast<std::size_t>(edge.triangle);
    const auto& tri = mesh.triangles[t];
    const Vec2 p0 = mesh.nodes[static_cast<std::size_t>(tri[0])];
    const Vec2 p1 = mesh.nodes[static_cast<std::size_t>(tri[1])];
    const Vec2 p2 = mesh.nodes[static_cast<std::size_t>(tri[2])];
    const double twice = cross(p1 - p0, p2 - p0);
    const std::array<Vec2, 3> grad{Vec2{(p1.y - p2.y) / twice, (p2.x - p1.x) / twice},
                                   Vec2{(p2.y - p0.y) / twice, (p0.x - p2.x) / twice},
                                   Vec2{(p0.y - p1.y) / twice, (p1.x - p0.x) / twice}};
    Tensor2 H;
    for (std::size_t a = 0; a < 3; ++a) H += Tensor2::outer(u[static_cast<std::size_t>(tri[a])], grad[a]);
    const auto& st = states[t];
    const Tensor2 T = linearized_piola_kirchhoff(st.T0, H, st.B0, beta, params);
    const Vec2 f = tractions.empty() ? Vec2{} : tractions[e];
    const Vec2 mismatch = T * edge_normal(mesh, edge) - f;
    total += edge_length(mesh, edge) * dot(mismatch, mismatch);
  }
  return total;
}

}  // namespace mrsla::oracles
