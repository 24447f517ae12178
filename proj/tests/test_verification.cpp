#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cutplate/errors.hpp"
#include "cutplate/solver.hpp"
#include "cutplate/verification.hpp"

using namespace cutplate;

namespace {

const Material plate_material;  // E = 100, nu = 0.3, t = 0.1

ExactSolution plate() { return ExactSolution(1.0, 0.5, {0.5, 0.5}, plate_material); }

// Square [a, b]^2; only the signed distance matters for an uncut grid.
class Square final : public Domain {
 public:
  Square(double a, double b) : a_(a), b_(b) {}
  double signed_distance(const Vec2& x) const override {
    const double c = 0.5 * (a_ + b_), r = 0.5 * (b_ - a_);
    const Vec2 d(std::abs(x.x() - c) - r, std::abs(x.y() - c) - r);
    return d.cwiseMax(0.0).norm() + std::min(std::max(d.x(), d.y()), 0.0);
  }
  Vec2 closest_point(const Vec2& x) const override { return x; }
  Vec2 normal(const Vec2&) const override { return {1.0, 0.0}; }
  double curvature(const Vec2&) const override { return 0.0; }
  Box bounding_box() const override { return {{a_, a_}, {b_, b_}}; }

 private:
  double a_, b_;
};

PointState polynomial_state(const Vec2& p, double cx) {
  // x^2 y^3 + cx * x^3 y
  const double x = p.x(), y = p.y();
  PointState s;
  s.value = x * x * y * y * y + cx * x * x * x * y;
  s.grad = {2 * x * y * y * y + 3 * cx * x * x * y, 3 * x * x * y * y + cx * x * x * x};
  s.xx = 2 * y * y * y + 6 * cx * x * y;
  s.xy = 6 * x * y * y + 3 * cx * x * x;
  s.yy = 6 * x * x * y;
  s.xxx = 6 * cx * y;
  s.xxy = 6 * y * y + 6 * cx * x;
  s.xyy = 12 * x * y;
  s.yyy = 6 * x * x;
  return s;
}

}  // namespace

TEST_CASE("exact plate solution: boundary values and center deflection") {
  const ExactSolution u = plate();
  const double kappa = 100.0 * 0.001 / (12.0 * 1.3);
  CHECK(kappa == doctest::Approx(6.410256e-3).epsilon(1e-6));
  const double center = 1.0 * std::pow(0.5, 4) / (64.0 * kappa) * (5.3 / 1.3);
  CHECK(center == doctest::Approx(0.621094).epsilon(1e-6));
  CHECK(u.center_deflection() == doctest::Approx(center).epsilon(1e-14));
  CHECK(u.eval({0.5, 0.5}).grad.norm() == 0.0);

  for (int k = 0; k < 48; ++k) {
    const double a = 2.0 * std::numbers::pi * k / 48.0 + 0.1;
    const Vec2 n(std::cos(a), std::sin(a));
    const Vec2 x = Vec2(0.5, 0.5) + 0.5 * n;
    const PointState s = u.eval(x);
    CHECK(std::abs(s.value) <= 1e-14);
    const double scale = stress(u.eval({0.5, 0.5}), plate_material).norm();
    CHECK(std::abs(n.dot(stress(s, plate_material) * n)) <= 1e-12 * scale);
  }
}

TEST_CASE("exact derivatives match finite differences") {
  const ExactSolution u = plate();
  const double e = 1e-5;
  for (const Vec2& x : {Vec2(0.3, 0.6), Vec2(0.9, 0.1), Vec2(0.52, 0.47)}) {
    auto d = [&](auto get, const Vec2& dir) {
      return (get(u.eval(x + e * dir)) - get(u.eval(x - e * dir))) / (2 * e);
    };
    const Vec2 ex(1, 0), ey(0, 1);
    const PointState s = u.eval(x);
    CHECK(s.grad.x() == doctest::Approx(d([](const PointState& p) { return p.value; }, ex)).epsilon(1e-8));
    CHECK(s.grad.y() == doctest::Approx(d([](const PointState& p) { return p.value; }, ey)).epsilon(1e-8));
    CHECK(s.xx == doctest::Approx(d([](const PointState& p) { return p.grad.x(); }, ex)).epsilon(1e-8));
    CHECK(s.xy == doctest::Approx(d([](const PointState& p) { return p.grad.x(); }, ey)).epsilon(1e-8));
    CHECK(s.yy == doctest::Approx(d([](const PointState& p) { return p.grad.y(); }, ey)).epsilon(1e-8));
    CHECK(s.xxx == doctest::Approx(d([](const PointState& p) { return p.xx; }, ex)).epsilon(1e-8));
    CHECK(s.xxy == doctest::Approx(d([](const PointState& p) { return p.xx; }, ey)).epsilon(1e-8));
    CHECK(s.xyy == doctest::Approx(d([](const PointState& p) { return p.yy; }, ex)).epsilon(1e-8));
    CHECK(s.yyy == doctest::Approx(d([](const PointState& p) { return p.yy; }, ey)).epsilon(1e-8));
    // The load is div div sigma(u) = kappa (1 + nu/(1-nu)) Laplacian^2 u.
    const double bilap = d([](const PointState& p) { return p.xxx + p.xyy; }, ex) +
                         d([](const PointState& p) { return p.xxy + p.yyy; }, ey);
    CHECK(u.load() == doctest::Approx(plate_material.kappa() * (1 + plate_material.nu_factor()) * bilap).epsilon(1e-7));
  }
  CHECK(u.load() == doctest::Approx(1.0 / 0.7).epsilon(1e-14));
  const NodalData n = u.nodal({0.2, 0.7});
  CHECK(n.dxy == u.eval({0.2, 0.7}).xy);
}

TEST_CASE("norms vanish for a field in the discrete space") {
  StudyConfig config;
  const Discretization disc = discretize(config, 1.0 / 16);
  auto field = [](const Vec2& x) { return polynomial_state(x, 0.7); };
  const Eigen::VectorXd uh = interpolate(
      [&](const Vec2& x) {
        const PointState s = field(x);
        return NodalData{s.value, s.grad.x(), s.grad.y(), s.xy};
      },
      disc.mesh, disc.dofs);
  const LevelErrors e = error_norms(uh, field, disc.mesh, disc.dofs, disc.geometry, config.material, disc.params);
  CHECK(e.l2 <= 1e-12);
  CHECK(e.h1 <= 1e-12);
  CHECK(e.h2b <= 1e-12);
  CHECK(e.energy <= 1e-12);
}

TEST_CASE("L2 norm on an uncut square matches the closed form") {
  const Square sq(0.25, 0.75);
  const double h = 0.125;
  const ActiveMesh mesh = build_active_mesh(sq, h, {{0.0, 0.0}, {1.0, 1.0}});
  REQUIRE(mesh.count(CellKind::cut) == 0);
  const DofMap dofs = build_dof_map(mesh);
  const CutGeometry geo = build_cut_geometry(sq, mesh, BoundaryMode::c1_spline);
  // Exact field p = x^2 + y, discrete field q = x^2, so e = y.
  auto exact = [](const Vec2& x) {
    PointState s;
    s.value = x.x() * x.x() + x.y();
    s.grad = {2 * x.x(), 1.0};
    s.xx = 2.0;
    return s;
  };
  const Eigen::VectorXd uh = interpolate(
      [](const Vec2& x) { return NodalData{x.x() * x.x(), 2 * x.x(), 0.0, 0.0}; }, mesh, dofs);
  const LevelErrors e = error_norms(uh, exact, mesh, dofs, geo, plate_material, NitscheParams::standard(plate_material));
  // Over [1/4, 3/4]^2: int y^2 and int (x^2 + y)^2.
  auto I = [](auto f) { return f(0.75) - f(0.25); };
  const double iy2 = 0.5 * I([](double t) { return t * t * t / 3; });
  const double ix4 = 0.5 * I([](double t) { return std::pow(t, 5) / 5; });
  const double ix2 = I([](double t) { return t * t * t / 3; });
  const double iy = I([](double t) { return t * t / 2; });
  const double ref = ix4 + 2 * ix2 * iy + iy2;
  CHECK(e.l2 == doctest::Approx(std::sqrt(iy2 / ref)).epsilon(1e-12));
  // Gradient error (0, 1) against |(2x, 1)|^2.
  const double gref = 4 * ix2 * 0.5 + 0.25;
  CHECK(e.h1 == doctest::Approx(std::sqrt(0.25 / gref)).epsilon(1e-12));
}

TEST_CASE("interpolation orders of the exact solution") {
  const ExactSolution u = plate();
  std::vector<double> hs, l2, h1, h2;
  for (double h : {1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64}) {
    StudyConfig config;
    const Discretization disc = discretize(config, h);
    const Eigen::VectorXd uh = interpolate([&](const Vec2& x) { return u.nodal(x); }, disc.mesh, disc.dofs);
    const LevelErrors e = error_norms(uh, [&](const Vec2& x) { return u.eval(x); }, disc.mesh, disc.dofs,
                                      disc.geometry, config.material, disc.params);
    hs.push_back(h);
    l2.push_back(e.l2);
    h1.push_back(e.h1);
    h2.push_back(e.h2b);
  }
  CHECK(fitted_slope(hs, l2) >= 3.8);
  CHECK(fitted_slope(hs, h1) >= 2.8);
  CHECK(fitted_slope(hs, h2) >= 1.8);
}

TEST_CASE("fitted slope of exact power laws") {
  const std::vector<double> h{0.5, 0.25, 0.125};
  CHECK(fitted_slope(h, {3 * 0.25, 3 * 0.0625, 3 * 0.015625}) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(std::isnan(fitted_slope({0.5}, {1.0})));
}

TEST_CASE("single level study reports no rates") {
  StudyConfig config;
  config.levels = 1;
  const StudyReport r = convergence_study(config);
  REQUIRE(r.levels.size() == 1);
  CHECK_FALSE(r.levels[0].rates.has_value());
  CHECK_FALSE(r.slopes.has_value());
}

TEST_CASE("fine levels improve by the optimal order") {
  StudyConfig config;
  config.h_start = 1.0 / 32;
  config.levels = 2;
  const StudyReport r = convergence_study(config);
  REQUIRE(r.levels.size() == 2);
  CHECK(r.levels[0].errors.l2 / r.levels[1].errors.l2 >= std::pow(2.0, 3.8));
  CHECK(r.levels[1].rates.has_value());
  CHECK(r.levels[1].errors.energy < r.levels[0].errors.energy);
}

TEST_CASE("failures carry the level") {
  StudyConfig config;
  config.gamma_scale = 0.0;
  config.levels = 2;
  try {
    convergence_study(config);
    FAIL("expected a solver failure");
  } catch (const SolverError& e) {
    CHECK(e.code() == ErrorCode::NotPositiveDefinite);
    CHECK(std::string(e.what()).find("level 0") != std::string::npos);
  }
}

TEST_CASE("moment condition holds on the discrete boundary to geometric accuracy") {
  const ExactSolution u = plate();
  std::vector<double> hs, mnn;
  for (double h : {1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64}) {
    StudyConfig config;
    const Discretization disc = discretize(config, h);
    double worst = 0.0;
    for (const auto& s : disc.geometry.boundary.segments) {
      for (const auto& p : boundary_quadrature(s, 8)) {
        worst = std::max(worst, std::abs(p.normal.dot(stress(u.eval(p.x), plate_material) * p.normal)));
      }
    }
    hs.push_back(h);
    mnn.push_back(worst);
  }
  CHECK(fitted_slope(hs, mnn) >= 2.0);
}

TEST_CASE("sampled elevation is radially symmetric") {
  StudyConfig config;
  const Discretization disc = discretize(config, 1.0 / 16);
  const SolveResult sol = solve(disc.system.A, disc.system.b);
  const LevelErrors e = error_norms(sol.x, [&](const Vec2& x) { return disc.exact.eval(x); }, disc.mesh,
                                    disc.dofs, disc.geometry, config.material, disc.params);
  const double peak = disc.exact.center_deflection();
  double asym = 0.0;
  const int n = 41;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const Vec2 x(static_cast<double>(i) / (n - 1), static_cast<double>(j) / (n - 1));
      const Vec2 r = Vec2(0.5, 0.5) + rotate_ccw(x - Vec2(0.5, 0.5));
      const double a = sample_solution(disc, sol.x, x);
      const double b = sample_solution(disc, sol.x, r);
      CHECK(std::isnan(a) == std::isnan(b));
      if (!std::isnan(a) && !std::isnan(b)) asym = std::max(asym, std::abs(a - b));
    }
  }
  CHECK(asym / peak <= 2.0 * e.l2);
  CHECK(std::isnan(sample_solution(disc, sol.x, {0.01, 0.01})));
}
