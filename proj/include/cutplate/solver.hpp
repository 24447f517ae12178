#pragma once

#include <cstdint>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace cutplate {

/// Symmetric sparse operator; both triangles are stored.
using SparseSymmetric = Eigen::SparseMatrix<double>;

struct SolveOptions {
  /// Systems larger than this go to preconditioned CG.
  Eigen::Index direct_limit = 200000;
  bool force_iterative = false;
  double tolerance = 1e-10;  // relative residual target
};

struct SolveResult {
  Eigen::VectorXd x;
  double relative_residual = 0.0;
  bool direct = true;
  int iterations = 0;  // CG iterations or refinement sweeps
};

/// Solves A x = b for symmetric positive definite A.
///
/// Direct path: LDL^T with a positivity check on the pivots, followed by a few
/// sweeps of iterative refinement with an extended-precision residual. The
/// achieved residual is reported, not enforced. Throws
/// SolverError(NotPositiveDefinite) on pivot breakdown, and
/// SolverError(NoConvergence) when CG misses the target.
SolveResult solve(const SparseSymmetric& A, const Eigen::VectorXd& b, const SolveOptions& options = {});

/// Estimate of lambda_max / lambda_min by power iteration on A and on A^-1.
double condition_estimate(const SparseSymmetric& A, std::uint64_t seed = 1, int max_iterations = 400);

/// Pivots with D_ii / A_ii below this are treated as breakdown.
inline constexpr double kPivotTolerance = 1e-13;

}  // namespace cutplate
