#include "cutplate/solver.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include "cutplate/errors.hpp"

namespace cutplate {

namespace {

using Factorization = Eigen::SimplicialLDLT<SparseSymmetric, Eigen::Lower>;

void factorize(Factorization& ldlt, const SparseSymmetric& A) {
  ldlt.compute(A);
  if (ldlt.info() != Eigen::Success) {
    throw SolverError(ErrorCode::NotPositiveDefinite, "sparse LDL^T factorization failed");
  }
  // D_ii / A_ii is invariant under symmetric diagonal scaling; a tiny or negative
  // ratio means the pivot was lost to cancellation.
  const Eigen::VectorXd d = ldlt.vectorD();
  const Eigen::VectorXd diag = A.diagonal();
  const auto& perm = ldlt.permutationP();
  // vectorD is in the permuted ordering: compare with the permuted diagonal.
  const Eigen::VectorXd pdiag = perm * diag;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (!(pdiag[i] > 0.0) || !(d[i] > kPivotTolerance * pdiag[i])) {
      throw SolverError(ErrorCode::NotPositiveDefinite,
                        "matrix is not positive definite (pivot breakdown)");
    }
  }
}

// Residual accumulated in extended precision. In double, the rounding of A x
// alone is of order eps |A| |x|, which for a fourth-order operator on fine
// meshes already exceeds 1e-10 |b|.
Eigen::VectorXd residual(const SparseSymmetric& A, const Eigen::VectorXd& x, const Eigen::VectorXd& b) {
  std::vector<long double> acc(b.data(), b.data() + b.size());
  for (Eigen::Index k = 0; k < A.outerSize(); ++k) {
    const long double xk = x[k];
    for (SparseSymmetric::InnerIterator it(A, k); it; ++it) acc[it.row()] -= it.value() * xk;
  }
  Eigen::VectorXd r(b.size());
  for (Eigen::Index i = 0; i < r.size(); ++i) r[i] = static_cast<double>(acc[i]);
  return r;
}

double relative_norm(const Eigen::VectorXd& r, const Eigen::VectorXd& b) {
  const double nb = b.norm();
  return nb > 0.0 ? r.norm() / nb : r.norm();
}

std::string format_residual(double r) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", r);
  return buf;
}

}  // namespace

SolveResult solve(const SparseSymmetric& A, const Eigen::VectorXd& b, const SolveOptions& options) {
  SolveResult result;
  if (b.norm() == 0.0) {
    result.x = Eigen::VectorXd::Zero(A.cols());
    if (!options.force_iterative && A.rows() <= options.direct_limit) {
      Factorization ldlt;
      factorize(ldlt, A);
    }
    return result;
  }

  if (!options.force_iterative && A.rows() <= options.direct_limit) {
    Factorization ldlt;
    factorize(ldlt, A);
    result.x = ldlt.solve(b);
    Eigen::VectorXd r = residual(A, result.x, b);
    result.relative_residual = relative_norm(r, b);
    // Refine while it helps; the residual of the rounded solution bounds what is attainable.
    for (int sweep = 0; sweep < 4 && result.relative_residual > 0.01 * options.tolerance; ++sweep) {
      const Eigen::VectorXd x = result.x + ldlt.solve(r);
      Eigen::VectorXd rx = residual(A, x, b);
      const double rel = relative_norm(rx, b);
      if (!(rel < result.relative_residual)) break;
      result.x = x;
      r = std::move(rx);
      result.relative_residual = rel;
      result.iterations = sweep + 1;
    }
    result.direct = true;
  } else {
    Eigen::ConjugateGradient<SparseSymmetric, Eigen::Lower | Eigen::Upper,
                             Eigen::IncompleteCholesky<double>>
        cg;
    cg.setTolerance(options.tolerance);
    cg.setMaxIterations(10 * static_cast<int>(A.rows()));
    cg.compute(A);
    if (cg.info() != Eigen::Success) {
      throw SolverError(ErrorCode::NotPositiveDefinite, "incomplete Cholesky preconditioner failed");
    }
    result.x = cg.solve(b);
    result.iterations = static_cast<int>(cg.iterations());
    result.relative_residual = relative_norm(residual(A, result.x, b), b);
    result.direct = false;
    if (!(result.relative_residual <= options.tolerance)) {
      throw SolverError(ErrorCode::NoConvergence,
                        "conjugate gradients missed the residual target after " +
                            std::to_string(result.iterations) +
                            " iterations: " + format_residual(result.relative_residual));
    }
  }
  return result;
}

double condition_estimate(const SparseSymmetric& A, std::uint64_t seed, int max_iterations) {
  Factorization ldlt;
  factorize(ldlt, A);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  auto power = [&](auto&& apply) {
    Eigen::VectorXd v(A.rows());
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = dist(rng);
    v.normalize();
    double lambda = 0.0;
    for (int it = 0; it < max_iterations; ++it) {
      Eigen::VectorXd w = apply(v);
      const double next = v.dot(w);  // Rayleigh quotient
      const double norm = w.norm();
      if (norm == 0.0) return 0.0;
      v = w / norm;
      if (it > 10 && std::abs(next - lambda) <= 1e-8 * std::abs(next)) {
        lambda = next;
        break;
      }
      lambda = next;
    }
    return lambda;
  };
  const double lmax = power([&](const Eigen::VectorXd& v) -> Eigen::VectorXd { return A * v; });
  const double inv_lmin =
      power([&](const Eigen::VectorXd& v) -> Eigen::VectorXd { return ldlt.solve(v); });
  if (!(inv_lmin > 0.0)) {
    throw SolverError(ErrorCode::NotPositiveDefinite, "non-positive inverse eigenvalue estimate");
  }
  return lmax * inv_lmin;
}

}  // namespace cutplate
