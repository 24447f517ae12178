#include "cutplate/bfs_basis.hpp"

#include <cmath>
#include <stdexcept>

namespace cutplate {

std::array<double, 4> hermite_1d(double t, double h, int order) {
  const double t2 = t * t;
  const double t3 = t2 * t;
  switch (order) {
    case 0:
      return {2 * t3 - 3 * t2 + 1, h * (t3 - 2 * t2 + t), -2 * t3 + 3 * t2, h * (t3 - t2)};
    case 1:
      return {(6 * t2 - 6 * t) / h, 3 * t2 - 4 * t + 1, (-6 * t2 + 6 * t) / h, 3 * t2 - 2 * t};
    case 2: {
      const double ih = 1.0 / h;
      return {(12 * t - 6) * ih * ih, (6 * t - 4) * ih, (-12 * t + 6) * ih * ih, (6 * t - 2) * ih};
    }
    case 3: {
      const double ih = 1.0 / h;
      return {12 * ih * ih * ih, 6 * ih * ih, -12 * ih * ih * ih, 6 * ih * ih};
    }
    default:
      throw std::out_of_range("hermite_1d: derivative order must be 0..3");
  }
}

namespace {

// Tensor product for one derivative pair. 1D local index: 0 = v0, 1 = s0, 2 = v1, 3 = s1.
ShapeTable tensor(const std::array<double, 4>& hx, const std::array<double, 4>& hy) {
  ShapeTable out{};
  for (int cy = 0; cy < 2; ++cy) {
    for (int cx = 0; cx < 2; ++cx) {
      const int corner = 2 * cy + cx;  // SW, SE, NW, NE
      const double vx = hx[2 * cx];
      const double sx = hx[2 * cx + 1];
      const double vy = hy[2 * cy];
      const double sy = hy[2 * cy + 1];
      out[4 * corner + 0] = vx * vy;
      out[4 * corner + 1] = sx * vy;
      out[4 * corner + 2] = vx * sy;
      out[4 * corner + 3] = sx * sy;
    }
  }
  return out;
}

}  // namespace

ShapeTable shape_values(const CellBox& cell, const Vec2& x, int a, int b) {
  const double h = cell.h();
  const double hy = cell.hi.y() - cell.lo.y();
  return tensor(hermite_1d((x.x() - cell.lo.x()) / h, h, a),
                hermite_1d((x.y() - cell.lo.y()) / hy, hy, b));
}

BasisEval::BasisEval(const CellBox& cell, const Vec2& x) {
  const double h = cell.h();
  const double hy = cell.hi.y() - cell.lo.y();
  const double tx = (x.x() - cell.lo.x()) / h;
  const double ty = (x.y() - cell.lo.y()) / hy;
  std::array<std::array<double, 4>, 4> hx;
  std::array<std::array<double, 4>, 4> hyv;
  for (int k = 0; k <= 3; ++k) {
    hx[k] = hermite_1d(tx, h, k);
    hyv[k] = hermite_1d(ty, hy, k);
  }
  for (const auto& [a, b] : kDerivatives) d_[derivative_slot(a, b)] = tensor(hx[a], hyv[b]);
}

Eigen::VectorXd interpolate(const std::function<NodalData(const Vec2&)>& fn, const ActiveMesh& mesh,
                            const DofMap& dofs) {
  Eigen::VectorXd u(dofs.n_dofs);
  for (std::size_t n = 0; n < mesh.nodes.size(); ++n) {
    const NodalData d = fn(mesh.node_position(static_cast<int>(n)));
    const auto& idx = dofs.node_dofs[n];
    u[idx[0]] = d.value;
    u[idx[1]] = d.dx;
    u[idx[2]] = d.dy;
    u[idx[3]] = d.dxy;
  }
  return u;
}

double evaluate(const Eigen::VectorXd& u, const ActiveMesh& mesh, const DofMap& dofs, int cell,
                const Vec2& x, int a, int b) {
  const ShapeTable phi = shape_values(mesh.cells[cell].box, x, a, b);
  double v = 0.0;
  for (int k = 0; k < 16; ++k) v += phi[k] * u[dofs.cell_dofs[cell][k]];
  return v;
}

}  // namespace cutplate
