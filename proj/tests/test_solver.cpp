#include <doctest.h>

#include <vector>

#include <Eigen/SparseCore>

#include "cutplate/errors.hpp"
#include "cutplate/solver.hpp"
#include "cutplate/verification.hpp"

using namespace cutplate;

namespace {

SparseSymmetric from_triplets(int n, const std::vector<Eigen::Triplet<double>>& t) {
  SparseSymmetric a(n, n);
  a.setFromTriplets(t.begin(), t.end());
  return a;
}

SparseSymmetric identity(int n) {
  SparseSymmetric a(n, n);
  a.setIdentity();
  return a;
}

}  // namespace

TEST_CASE("identity and a 2x2 hand solve") {
  Eigen::VectorXd b(3);
  b << 1.5, -2.0, 0.25;
  CHECK(solve(identity(3), b).x == b);

  const SparseSymmetric a = from_triplets(2, {{0, 0, 2.0}, {0, 1, 1.0}, {1, 0, 1.0}, {1, 1, 2.0}});
  const SolveResult r = solve(a, Eigen::Vector2d(1.0, 1.0));
  CHECK(r.x[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(r.x[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(r.direct);
  CHECK(r.relative_residual <= 1e-15);
}

TEST_CASE("indefinite matrices are rejected") {
  const SparseSymmetric a = from_triplets(2, {{0, 0, 1.0}, {0, 1, 2.0}, {1, 0, 2.0}, {1, 1, 1.0}});
  try {
    solve(a, Eigen::Vector2d(1.0, 0.0));
    FAIL("expected NotPositiveDefinite");
  } catch (const SolverError& e) {
    CHECK(e.code() == ErrorCode::NotPositiveDefinite);
  }
  CHECK_THROWS_AS(condition_estimate(a), SolverError);
}

TEST_CASE("iterative path reaches the same solution") {
  // 1D Laplacian.
  const int n = 200;
  std::vector<Eigen::Triplet<double>> t;
  for (int i = 0; i < n; ++i) {
    t.emplace_back(i, i, 2.0);
    if (i > 0) t.emplace_back(i, i - 1, -1.0);
    if (i + 1 < n) t.emplace_back(i, i + 1, -1.0);
  }
  const SparseSymmetric a = from_triplets(n, t);
  const Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(n, -1.0, 2.0);
  const SolveResult direct = solve(a, b);
  SolveOptions opt;
  opt.force_iterative = true;
  const SolveResult cg = solve(a, b, opt);
  CHECK_FALSE(cg.direct);
  CHECK(cg.relative_residual <= 1e-10);
  CHECK((cg.x - direct.x).norm() <= 1e-6 * direct.x.norm());
}

TEST_CASE("condition estimates") {
  CHECK(condition_estimate(identity(5)) == doctest::Approx(1.0).epsilon(1e-12));
  const SparseSymmetric d = from_triplets(2, {{0, 0, 1.0}, {1, 1, 1e6}});
  const double c = condition_estimate(d);
  CHECK(c >= 0.5e6);
  CHECK(c <= 2e6);
}

TEST_CASE("assembled circle problem is solved to the residual target") {
  StudyConfig config;
  const Discretization disc = discretize(config, 1.0 / 16);
  const SolveResult r = solve(disc.system.A, disc.system.b);
  CHECK(r.direct);
  CHECK(r.relative_residual <= 1e-10);
  CHECK((disc.system.A * r.x - disc.system.b).norm() <= 1e-10 * disc.system.b.norm());
  // Deterministic direct path.
  CHECK(solve(disc.system.A, disc.system.b).x == r.x);
}
