#pragma once

// Oracle suites behind the `verify` subcommand. Each check compares library output against
// an independent computation from oracles.hpp.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "mrsla/coercivity.hpp"
#include "mrsla/config.hpp"

namespace mrsla {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct SuiteResult {
  std::string suite;
  std::vector<CheckResult> checks;
  double seconds = 0.0;

  bool pass() const;
};

using MatrixBuilder = std::function<CoercivityMatrix(const SpectralState&, double, const MaterialParams&)>;

struct VerifyOptions {
  std::uint64_t seed = 42;
  int trials = 10000;
  MatrixBuilder builder = build_coercivity_matrix;  ///< replaceable for mutation tests
};

/// Random material and point data over the ranges the identity suites use.
struct Sampler {
  explicit Sampler(std::uint64_t seed) : rng(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  /// s1 in (0.1, 5], s2 in [-5, s1)
  MaterialParams material(double beta = 1.0);
  Tensor2 tensor(double scale = 1.0);

  std::mt19937_64 rng;
};

/// Square patch with slip on the left and bottom, traction (t, 0) on the right, free top.
RunConfig patch_config(int n, double traction, double s1 = 1.0, double s2 = -0.3, double beta = 100.0);

/// Unit square sheared by moving the clamped top edge by kappa horizontally; bottom clamped,
/// sides traction free.
RunConfig pure_shear_config(int n, int steps, double kappa = 0.2, double s1 = 1.0, double s2 = -0.3,
                            double beta = 1e4);

/// Same square with every edge clamped to the affine simple-shear field u = kappa * Y e1, for
/// which homogeneous simple shear is the exact solution.
RunConfig affine_shear_config(int n, int steps, double kappa = 0.2, double s1 = 1.0, double s2 = -0.3,
                              double beta = 1e4);

SuiteResult verify_quadform(const VerifyOptions& options = {});
SuiteResult verify_psd(const VerifyOptions& options = {});
SuiteResult verify_patch(const VerifyOptions& options = {});
SuiteResult verify_pure_shear(const VerifyOptions& options = {});

/// Suite by name (quadform, psd, patch, pure-shear) or all of them for "all" in the order
/// psd, quadform, patch, pure-shear. Throws InvalidArgument for unknown names.
std::vector<SuiteResult> run_verify(const std::string& name, const VerifyOptions& options = {});

/// One PASS/FAIL line per check.
void print_results(const std::vector<SuiteResult>& results, std::ostream& out);
std::string results_json(const std::vector<SuiteResult>& results);

}  // namespace mrsla
