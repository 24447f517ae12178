#include <doctest.h>

#include <cmath>
#include <random>

#include "cutplate/bfs_basis.hpp"
#include "cutplate/mesh.hpp"

using namespace cutplate;

namespace {

const Circle unit_plate({0.5, 0.5}, 0.5);

double dot(const ShapeTable& phi, const std::array<double, 16>& dofs) {
  double s = 0.0;
  for (int k = 0; k < 16; ++k) s += phi[k] * dofs[k];
  return s;
}

// x^m y^n and its derivatives.
double monomial(int m, int n, int a, int b, const Vec2& x) {
  auto d = [](int p, int k, double t) {
    if (k > p) return 0.0;
    double c = 1.0;
    for (int i = 0; i < k; ++i) c *= p - i;
    return c * std::pow(t, p - k);
  };
  return d(m, a, x.x()) * d(n, b, x.y());
}

}  // namespace

TEST_CASE("hermite_1d known values") {
  const auto v0 = hermite_1d(0.0, 0.3, 0);
  CHECK(v0[0] == 1.0);
  CHECK(v0[1] == 0.0);
  CHECK(v0[2] == 0.0);
  CHECK(v0[3] == 0.0);
  const auto s1 = hermite_1d(1.0, 0.3, 1);
  CHECK(s1[0] == doctest::Approx(0.0));
  CHECK(s1[1] == doctest::Approx(0.0));
  CHECK(s1[2] == doctest::Approx(0.0));
  CHECK(s1[3] == doctest::Approx(1.0));
  const auto mid = hermite_1d(0.5, 1.0, 0);
  CHECK(mid[0] == doctest::Approx(0.5));
  CHECK(mid[1] == doctest::Approx(0.125));
  CHECK(mid[2] == doctest::Approx(0.5));
  CHECK(mid[3] == doctest::Approx(-0.125));
}

TEST_CASE("hermite_1d Kronecker property with physical slopes") {
  const double h = 0.125;
  const auto a0 = hermite_1d(0.0, h, 0), a1 = hermite_1d(1.0, h, 0);
  const auto d0 = hermite_1d(0.0, h, 1), d1 = hermite_1d(1.0, h, 1);
  for (int k = 0; k < 4; ++k) {
    CHECK(a0[k] == doctest::Approx(k == 0 ? 1.0 : 0.0));
    CHECK(a1[k] == doctest::Approx(k == 2 ? 1.0 : 0.0));
    CHECK(d0[k] == doctest::Approx(k == 1 ? 1.0 : 0.0));
    CHECK(d1[k] == doctest::Approx(k == 3 ? 1.0 : 0.0));
  }
  // Value functions sum to one everywhere, including outside [0, 1].
  for (double t : {-0.7, 0.0, 0.3, 1.0, 1.9}) {
    const auto v = hermite_1d(t, h, 0);
    CHECK(v[0] + v[2] == doctest::Approx(1.0));
  }
}

TEST_CASE("hermite_1d reproduces cubics from endpoint data") {
  const double h = 0.4, x0 = 0.2;
  auto f = [](double x) { return 1.5 * x * x * x - x * x + 0.25 * x - 3.0; };
  auto df = [](double x) { return 4.5 * x * x - 2.0 * x + 0.25; };
  for (double t : {-0.5, 0.1, 0.77, 1.4}) {
    const auto H = hermite_1d(t, h, 0);
    const double v = H[0] * f(x0) + H[1] * df(x0) + H[2] * f(x0 + h) + H[3] * df(x0 + h);
    CHECK(v == doctest::Approx(f(x0 + t * h)).epsilon(1e-13));
  }
}

TEST_CASE("shape derivatives match central differences") {
  const CellBox cell{{0.25, 0.5}, {0.375, 0.625}};
  const double h = cell.h();
  const double step = 1e-5 * h;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-0.5, 1.5);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec2 x = cell.lo + h * Vec2(u(rng), u(rng));
    for (const auto& [a, b] : kDerivatives) {
      if (a + b == 0) continue;
      // Differentiate the next lower derivative in x (or y when a = 0).
      const bool in_x = a > 0;
      const Vec2 dx = in_x ? Vec2(step, 0.0) : Vec2(0.0, step);
      const auto lo = shape_values(cell, x - dx, in_x ? a - 1 : a, in_x ? b : b - 1);
      const auto hi = shape_values(cell, x + dx, in_x ? a - 1 : a, in_x ? b : b - 1);
      const auto exact = shape_values(cell, x, a, b);
      double scale = 0.0;
      for (double v : exact) scale = std::max(scale, std::abs(v));
      for (int k = 0; k < 16; ++k) {
        const double fd = (hi[k] - lo[k]) / (2.0 * step);
        CHECK(std::abs(fd - exact[k]) <= 1e-6 * scale);
      }
    }
  }
}

TEST_CASE("shape values at a corner and mixed-derivative symmetry") {
  const CellBox cell{{0.0, 0.0}, {0.5, 0.5}};
  const auto phi = shape_values(cell, cell.lo, 0, 0);
  for (int k = 0; k < 16; ++k) CHECK(phi[k] == (k == 0 ? 1.0 : 0.0));
  const Vec2 x(0.13, 0.41);
  const BasisEval all(cell, x);
  for (const auto& [a, b] : kDerivatives) {
    const auto direct = shape_values(cell, x, a, b);
    for (int k = 0; k < 16; ++k) CHECK(all(a, b)[k] == direct[k]);
  }
}

TEST_CASE("constant and bicubic reproduction, also outside the cell") {
  const CellBox cell{{0.5, 0.25}, {0.625, 0.375}};
  std::array<double, 16> one{};
  for (int c = 0; c < 4; ++c) one[4 * c] = 1.0;
  std::array<double, 16> cubic{};
  for (int c = 0; c < 4; ++c) {
    const Vec2 p = cell.lo + cell.h() * Vec2(c % 2, c / 2);
    cubic[4 * c + 0] = monomial(3, 3, 0, 0, p);
    cubic[4 * c + 1] = monomial(3, 3, 1, 0, p);
    cubic[4 * c + 2] = monomial(3, 3, 0, 1, p);
    cubic[4 * c + 3] = monomial(3, 3, 1, 1, p);
  }
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Vec2 x = cell.lo + cell.h() * Vec2(u(rng), u(rng));
    CHECK(dot(shape_values(cell, x, 0, 0), one) == doctest::Approx(1.0).epsilon(1e-13));
    for (const auto& [a, b] : kDerivatives) {
      const double exact = monomial(3, 3, a, b, x);
      CHECK(std::abs(dot(shape_values(cell, x, a, b), cubic) - exact) <= 1e-12 * std::max(1.0, std::abs(exact)));
    }
    // The (3, 3) mixed derivative of x^3 y^3 is 36, beyond BasisEval's total order 3.
    const auto h3x = hermite_1d((x.x() - cell.lo.x()) / cell.h(), cell.h(), 3);
    const auto h3y = hermite_1d((x.y() - cell.lo.y()) / cell.h(), cell.h(), 3);
    double v = 0.0;
    for (int cy = 0; cy < 2; ++cy) {
      for (int cx = 0; cx < 2; ++cx) {
        const int c = 2 * cy + cx;
        v += h3x[2 * cx] * h3y[2 * cy] * cubic[4 * c] + h3x[2 * cx + 1] * h3y[2 * cy] * cubic[4 * c + 1] +
             h3x[2 * cx] * h3y[2 * cy + 1] * cubic[4 * c + 2] +
             h3x[2 * cx + 1] * h3y[2 * cy + 1] * cubic[4 * c + 3];
      }
    }
    CHECK(v == doctest::Approx(36.0).epsilon(1e-9));
  }
}

TEST_CASE("nodal interpolation") {
  const double h = 1.0 / 8;
  const ActiveMesh mesh = build_active_mesh(unit_plate, h, unit_plate.bounding_box().expanded(2 * h));
  const DofMap dofs = build_dof_map(mesh);

  const Eigen::VectorXd one = interpolate([](const Vec2&) { return NodalData{1.0, 0.0, 0.0, 0.0}; }, mesh, dofs);
  for (std::size_t n = 0; n < mesh.nodes.size(); ++n) {
    CHECK(one[dofs.node_dofs[n][0]] == 1.0);
    for (int k = 1; k < 4; ++k) CHECK(one[dofs.node_dofs[n][k]] == 0.0);
  }

  // x^2 y lies in the bicubic space and is reproduced exactly.
  const Eigen::VectorXd u = interpolate(
      [](const Vec2& x) {
        return NodalData{x.x() * x.x() * x.y(), 2 * x.x() * x.y(), x.x() * x.x(), 2 * x.x()};
      },
      mesh, dofs);
  double worst = 0.0;
  for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
    for (const auto& q : cell_quadrature(mesh.cells[c].box, 8)) {
      worst = std::max(worst, std::abs(evaluate(u, mesh, dofs, static_cast<int>(c), q.x) -
                                       q.x.x() * q.x.x() * q.x.y()));
    }
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("global interpolant is C1 across faces") {
  const double h = 1.0 / 16;
  const ActiveMesh mesh = build_active_mesh(unit_plate, h, unit_plate.bounding_box().expanded(2 * h));
  const DofMap dofs = build_dof_map(mesh);
  const Eigen::VectorXd u = interpolate(
      [](const Vec2& x) {
        const double s = std::sin(3 * x.x()), c = std::cos(2 * x.y());
        return NodalData{s * c, 3 * std::cos(3 * x.x()) * c, -2 * s * std::sin(2 * x.y()),
                         -6 * std::cos(3 * x.x()) * std::sin(2 * x.y())};
      },
      mesh, dofs);
  double worst0 = 0.0, worst1 = 0.0, jump2 = 0.0;
  for (const auto& f : mesh.faces) {
    for (double t : {0.1, 0.5, 0.83}) {
      const Vec2 x = f.p0 + t * (f.p1 - f.p0);
      worst0 = std::max(worst0, std::abs(evaluate(u, mesh, dofs, f.first, x) - evaluate(u, mesh, dofs, f.second, x)));
      for (const auto& [a, b] : {std::pair{1, 0}, std::pair{0, 1}}) {
        worst1 = std::max(worst1, std::abs(evaluate(u, mesh, dofs, f.first, x, a, b) -
                                           evaluate(u, mesh, dofs, f.second, x, a, b)));
      }
      const bool xn = f.normal == FaceNormal::x;
      jump2 = std::max(jump2, std::abs(evaluate(u, mesh, dofs, f.first, x, xn ? 2 : 0, xn ? 0 : 2) -
                                       evaluate(u, mesh, dofs, f.second, x, xn ? 2 : 0, xn ? 0 : 2)));
    }
  }
  CHECK(worst0 <= 1e-13);
  CHECK(worst1 <= 1e-12);
  CHECK(jump2 > 1e-6);  // second normal derivatives do jump; that is what the ghost penalty sees
}
