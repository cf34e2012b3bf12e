#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mrsla {

/// Compressed-row real matrix. Column indices are sorted within each row; no symmetry assumed.
struct CsrMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> row_ptr{0};
  std::vector<int> col;
  std::vector<double> val;

  std::size_t nonzeros() const { return val.size(); }
  double at(std::size_t i, std::size_t j) const;

  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> multiply(std::span<const double> x) const;
  std::vector<double> multiply_transpose(std::span<const double> x) const;
  /// Dense row-major copy; intended for tests on small systems.
  std::vector<double> dense() const;
};

/// Accumulates (row, col, value) contributions. build() merges duplicates in insertion
/// order, so the result depends only on the sequence of add() calls.
class TripletBuilder {
 public:
  void reserve(std::size_t n) { entries_.reserve(n); }
  void add(int row, int col, double value) { entries_.push_back({row, col, value}); }
  CsrMatrix build(std::size_t rows, std::size_t cols) const;

 private:
  struct Entry {
    int row;
    int col;
    double value;
  };
  std::vector<Entry> entries_;
};

double norm2(std::span<const double> x);

/// ||b - A x||_2 / ||b||_2 (or ||A x|| when b = 0).
double relative_residual(const CsrMatrix& A, std::span<const double> x, std::span<const double> b);

struct IterativeResult {
  std::vector<double> x;
  int iterations = 0;
  double residual = 0.0;  ///< relative residual of the returned x
  bool converged = false;
};

/// Direct sparse LU (partial pivoting with column ordering). Throws SolverStagnation when
/// the factorization breaks down.
std::vector<double> sparse_lu_solve(const CsrMatrix& A, std::span<const double> b);

/// Restarted GMRES with right Jacobi scaling. `x0` may be empty.
IterativeResult gmres(const CsrMatrix& A, std::span<const double> b, double tol, int max_iter, int restart = 60,
                      std::span<const double> x0 = {});

/// Conjugate gradients on the normal equations A^T A x = A^T b; stops on the true residual.
IterativeResult cgnr(const CsrMatrix& A, std::span<const double> b, double tol, int max_iter);

}  // namespace mrsla
