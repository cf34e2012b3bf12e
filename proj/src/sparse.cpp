#include "mrsla/sparse.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "mrsla/errors.hpp"

namespace mrsla {

double CsrMatrix::at(std::size_t i, std::size_t j) const {
  const auto begin = col.begin() + static_cast<std::ptrdiff_t>(row_ptr[i]);
  const auto end = col.begin() + static_cast<std::ptrdiff_t>(row_ptr[i + 1]);
  const auto it = std::lower_bound(begin, end, static_cast<int>(j));
  if (it == end || *it != static_cast<int>(j)) return 0.0;
  return val[static_cast<std::size_t>(it - col.begin())];
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  for (std::size_t i = 0; i < rows; ++i) {
    double s = 0.0;
    for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += val[k] * x[static_cast<std::size_t>(col[k])];
    y[i] = s;
  }
}

std::vector<double> CsrMatrix::multiply(std::span<const double> x) const {
  std::vector<double> y(rows);
  multiply(x, y);
  return y;
}

std::vector<double> CsrMatrix::multiply_transpose(std::span<const double> x) const {
  std::vector<double> y(cols, 0.0);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) y[static_cast<std::size_t>(col[k])] += val[k] * x[i];
  }
  return y;
}

std::vector<double> CsrMatrix::dense() const {
  std::vector<double> d(rows * cols, 0.0);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) d[i * cols + static_cast<std::size_t>(col[k])] += val[k];
  }
  return d;
}

CsrMatrix TripletBuilder::build(std::size_t rows, std::size_t cols) const {
  std::vector<std::size_t> order(entries_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [this](std::size_t l, std::size_t r) {
    const auto& a = entries_[l];
    const auto& b = entries_[r];
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  CsrMatrix m;
  m.rows = rows;
  m.cols = cols;
  m.row_ptr.assign(rows + 1, 0);
  int last_row = -1;
  int last_col = -1;
  for (std::size_t idx : order) {
    const auto& e = entries_[idx];
    if (e.row < 0 || e.col < 0 || static_cast<std::size_t>(e.row) >= rows || static_cast<std::size_t>(e.col) >= cols) {
      throw Error(ErrorKind::InternalInconsistency, "triplet outside matrix bounds");
    }
    if (e.row == last_row && e.col == last_col) {
      m.val.back() += e.value;
      continue;
    }
    last_row = e.row;
    last_col = e.col;
    m.col.push_back(e.col);
    m.val.push_back(e.value);
    ++m.row_ptr[static_cast<std::size_t>(e.row) + 1];
  }
  for (std::size_t i = 0; i < rows; ++i) m.row_ptr[i + 1] += m.row_ptr[i];
  return m;
}

double norm2(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

double relative_residual(const CsrMatrix& A, std::span<const double> x, std::span<const double> b) {
  std::vector<double> r = A.multiply(x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
  const double nb = norm2(b);
  return nb > 0.0 ? norm2(r) / nb : norm2(r);
}

std::vector<double> sparse_lu_solve(const CsrMatrix& A, std::span<const double> b) {
  using SpMat = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
  std::vector<Eigen::Triplet<double, int>> trips;
  trips.reserve(A.nonzeros());
  for (std::size_t i = 0; i < A.rows; ++i) {
    for (std::size_t k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) trips.emplace_back(static_cast<int>(i), A.col[k], A.val[k]);
  }
  SpMat M(static_cast<int>(A.rows), static_cast<int>(A.cols));
  M.setFromTriplets(trips.begin(), trips.end());
  M.makeCompressed();
  Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(M);
  if (lu.info() != Eigen::Success) {
    throw Error(ErrorKind::SolverStagnation, "sparse LU factorization failed: " + lu.lastErrorMessage());
  }
  const Eigen::Map<const Eigen::VectorXd> rhs(b.data(), static_cast<Eigen::Index>(b.size()));
  Eigen::VectorXd x = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !x.allFinite()) {
    throw Error(ErrorKind::SolverStagnation, "sparse LU solve failed");
  }
  return {x.data(), x.data() + x.size()};
}

IterativeResult gmres(const CsrMatrix& A, std::span<const double> b, double tol, int max_iter, int restart,
                      std::span<const double> x0) {
  const std::size_t n = A.rows;
  IterativeResult res;
  res.x.assign(n, 0.0);
  if (!x0.empty()) std::copy(x0.begin(), x0.end(), res.x.begin());
  const double nb = norm2(b);
  if (nb == 0.0) {
    std::fill(res.x.begin(), res.x.end(), 0.0);
    res.converged = true;
    return res;
  }

  // right Jacobi scaling: solve (A D^{-1}) y = b, x = D^{-1} y
  std::vector<double> dinv(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = A.at(i, i);
    if (d != 0.0 && std::isfinite(d)) dinv[i] = 1.0 / d;
  }

  const int m = std::max(1, restart);
  std::vector<std::vector<double>> V(static_cast<std::size_t>(m) + 1, std::vector<double>(n));
  std::vector<double> Hm(static_cast<std::size_t>((m + 1) * m), 0.0);
  std::vector<double> cs(static_cast<std::size_t>(m)), sn(static_cast<std::size_t>(m)),
      g(static_cast<std::size_t>(m) + 1);
  std::vector<double> w(n), z(n), r(n);
  auto h = [&](int i, int j) -> double& { return Hm[static_cast<std::size_t>(i * m + j)]; };

  int it = 0;
  while (it < max_iter) {
    A.multiply(res.x, r);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
    double beta = norm2(r);
    res.residual = beta / nb;
    if (res.residual <= tol) {
      res.converged = true;
      break;
    }
    for (std::size_t i = 0; i < n; ++i) V[0][i] = r[i] / beta;
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = beta;
    int j = 0;
    for (; j < m && it < max_iter; ++j, ++it) {
      for (std::size_t i = 0; i < n; ++i) z[i] = dinv[i] * V[static_cast<std::size_t>(j)][i];
      A.multiply(z, w);
      for (int k = 0; k <= j; ++k) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += w[i] * V[static_cast<std::size_t>(k)][i];
        h(k, j) = s;
        for (std::size_t i = 0; i < n; ++i) w[i] -= s * V[static_cast<std::size_t>(k)][i];
      }
      const double hn = norm2(w);
      h(j + 1, j) = hn;
      if (hn > 0.0) {
        for (std::size_t i = 0; i < n; ++i) V[static_cast<std::size_t>(j) + 1][i] = w[i] / hn;
      }
      for (int k = 0; k < j; ++k) {
        const double t = cs[static_cast<std::size_t>(k)] * h(k, j) + sn[static_cast<std::size_t>(k)] * h(k + 1, j);
        h(k + 1, j) = -sn[static_cast<std::size_t>(k)] * h(k, j) + cs[static_cast<std::size_t>(k)] * h(k + 1, j);
        h(k, j) = t;
      }
      const double denom = std::hypot(h(j, j), h(j + 1, j));
      cs[static_cast<std::size_t>(j)] = denom > 0.0 ? h(j, j) / denom : 1.0;
      sn[static_cast<std::size_t>(j)] = denom > 0.0 ? h(j + 1, j) / denom : 0.0;
      h(j, j) = denom;
      h(j + 1, j) = 0.0;
      g[static_cast<std::size_t>(j) + 1] = -sn[static_cast<std::size_t>(j)] * g[static_cast<std::size_t>(j)];
      g[static_cast<std::size_t>(j)] *= cs[static_cast<std::size_t>(j)];
      if (std::abs(g[static_cast<std::size_t>(j) + 1]) / nb <= tol || hn == 0.0) {
        ++j;
        ++it;
        break;
      }
    }
    // back substitution for y, then x += D^{-1} V y
    std::vector<double> y(static_cast<std::size_t>(j), 0.0);
    for (int k = j - 1; k >= 0; --k) {
      double s = g[static_cast<std::size_t>(k)];
      for (int l = k + 1; l < j; ++l) s -= h(k, l) * y[static_cast<std::size_t>(l)];
      y[static_cast<std::size_t>(k)] = h(k, k) != 0.0 ? s / h(k, k) : 0.0;
    }
    for (int k = 0; k < j; ++k) {
      for (std::size_t i = 0; i < n; ++i) res.x[i] += dinv[i] * y[static_cast<std::size_t>(k)] * V[static_cast<std::size_t>(k)][i];
    }
  }
  res.iterations = it;
  res.residual = relative_residual(A, res.x, b);
  res.converged = res.residual <= tol;
  return res;
}

IterativeResult cgnr(const CsrMatrix& A, std::span<const double> b, double tol, int max_iter) {
  const std::size_t n = A.cols;
  IterativeResult res;
  res.x.assign(n, 0.0);
  const double nb = norm2(b);
  if (nb == 0.0) {
    res.converged = true;
    return res;
  }
  std::vector<double> r(b.begin(), b.end());
  std::vector<double> z = A.multiply_transpose(r);
  std::vector<double> p = z;
  double zz = 0.0;
  for (double v : z) zz += v * v;
  int it = 0;
  for (; it < max_iter; ++it) {
    if (norm2(r) / nb <= tol) break;
    const std::vector<double> Ap = A.multiply(p);
    double denom = 0.0;
    for (double v : Ap) denom += v * v;
    if (denom == 0.0) break;
    const double a = zz / denom;
    for (std::size_t i = 0; i < n; ++i) res.x[i] += a * p[i];
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= a * Ap[i];
    z = A.multiply_transpose(r);
    double zz_new = 0.0;
    for (double v : z) zz_new += v * v;
    const double bcoef = zz_new / zz;
    zz = zz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + bcoef * p[i];
  }
  res.iterations = it;
  res.residual = relative_residual(A, res.x, b);
  res.converged = res.residual <= tol;
  return res;
}

}  // namespace mrsla
