#pragma once

#include <array>
#include <functional>

#include <Eigen/Core>

#include "cutplate/core.hpp"
#include "cutplate/geometry.hpp"
#include "cutplate/mesh.hpp"

namespace cutplate {

/// Cubic Hermite functions on a cell of size h, in local order
/// (value at 0, slope at 0, value at 1, slope at 1).
///
/// `xi` is the reference coordinate (x - x0) / h and may lie outside [0, 1].
/// Slope functions carry a factor h so that all DOFs are physical derivatives;
/// `order` > 0 returns d^order/dx^order in physical units.
std::array<double, 4> hermite_1d(double xi, double h, int order);

using ShapeTable = std::array<double, 16>;

/// Derivative multi-indices (a, b), a + b <= 3, in the storage order of BasisEval.
inline constexpr std::array<std::array<int, 2>, 10> kDerivatives{{
    {0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}, {3, 0}, {2, 1}, {1, 2}, {0, 3}}};

constexpr int derivative_slot(int a, int b) {
  const int order = a + b;
  return order * (order + 1) / 2 + b;
}

/// Values of d^(a+b) phi_i / dx^a dy^b of the 16 BFS shape functions of `cell` at x.
/// Local order: corners (SW, SE, NW, NE) x DOF kinds (v, v_x, v_y, v_xy).
ShapeTable shape_values(const CellBox& cell, const Vec2& x, int a, int b);

/// All 10 derivative tables up to total order 3 at one point.
class BasisEval {
 public:
  BasisEval(const CellBox& cell, const Vec2& x);
  const ShapeTable& operator()(int a, int b) const { return d_[derivative_slot(a, b)]; }

 private:
  std::array<ShapeTable, 10> d_;
};

struct NodalData {
  double value = 0.0;
  double dx = 0.0;
  double dy = 0.0;
  double dxy = 0.0;
};

/// Nodal Hermite interpolant of a C^1 function given by its (v, v_x, v_y, v_xy).
Eigen::VectorXd interpolate(const std::function<NodalData(const Vec2&)>& fn, const ActiveMesh& mesh,
                            const DofMap& dofs);

/// Derivative (a, b) at x of the discrete function u restricted to `cell`'s polynomial.
double evaluate(const Eigen::VectorXd& u, const ActiveMesh& mesh, const DofMap& dofs, int cell,
                const Vec2& x, int a = 0, int b = 0);

}  // namespace cutplate
