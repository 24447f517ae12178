#include "cutplate/verification.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include "cutplate/errors.hpp"
#include "cutplate/quadrature.hpp"
#include "cutplate/solver.hpp"

namespace cutplate {

ExactSolution::ExactSolution(double load, double radius, Vec2 center, const Material& mat)
    : radius_(radius), center_(std::move(center)), mat_(mat) {
  const double a = load * std::pow(radius, 4) / (64.0 * mat.kappa());
  const double c = (5.0 + mat.nu) / (1.0 + mat.nu);
  c0_ = a * c;
  c1_ = -a * (1.0 + c) / (radius * radius);
  c2_ = a / std::pow(radius, 4);
}

PointState ExactSolution::eval(const Vec2& x) const {
  const double dx = x.x() - center_.x();
  const double dy = x.y() - center_.y();
  const double q = dx * dx + dy * dy;
  PointState s;
  s.value = c0_ + c1_ * q + c2_ * q * q;
  const double g = 2.0 * c1_ + 4.0 * c2_ * q;
  s.grad = {g * dx, g * dy};
  s.xx = g + 8.0 * c2_ * dx * dx;
  s.xy = 8.0 * c2_ * dx * dy;
  s.yy = g + 8.0 * c2_ * dy * dy;
  s.xxx = 24.0 * c2_ * dx;
  s.xxy = 8.0 * c2_ * dy;
  s.xyy = 8.0 * c2_ * dx;
  s.yyy = 24.0 * c2_ * dy;
  return s;
}

NodalData ExactSolution::nodal(const Vec2& x) const {
  const PointState s = eval(x);
  return {s.value, s.grad.x(), s.grad.y(), s.xy};
}

// div div sigma(u) = kappa (1 + nu/(1-nu)) Laplacian^2 u, and Laplacian^2 q^2 = 64.
double ExactSolution::load() const { return mat_.kappa() * (1.0 + mat_.nu_factor()) * 64.0 * c2_; }

namespace {

PointState discrete_state(const Eigen::VectorXd& uh, const DofMap& dofs, const CellBox& box,
                          int cell, const Vec2& x) {
  const BasisEval basis(box, x);
  const auto& idx = dofs.cell_dofs[cell];
  PointState s;
  double* fields[] = {&s.value, &s.grad.x(), &s.grad.y(), &s.xx, &s.xy,
                      &s.yy,    &s.xxx,      &s.xxy,      &s.xyy, &s.yyy};
  for (int d = 0; d < 10; ++d) {
    const auto& tab = basis(kDerivatives[d][0], kDerivatives[d][1]);
    double v = 0.0;
    for (int i = 0; i < 16; ++i) v += tab[i] * uh[idx[i]];
    *fields[d] = v;
  }
  return s;
}

PointState difference(const PointState& a, const PointState& b) {
  PointState d;
  d.value = a.value - b.value;
  d.grad = a.grad - b.grad;
  d.xx = a.xx - b.xx;
  d.xy = a.xy - b.xy;
  d.yy = a.yy - b.yy;
  d.xxx = a.xxx - b.xxx;
  d.xxy = a.xxy - b.xxy;
  d.xyy = a.xyy - b.xyy;
  d.yyy = a.yyy - b.yyy;
  return d;
}

double hessian_sq(const PointState& s) { return s.xx * s.xx + 2.0 * s.xy * s.xy + s.yy * s.yy; }

double strain_energy(const PointState& s, const Material& mat) {
  const double tr = s.xx + s.yy;
  return mat.kappa() * (hessian_sq(s) + mat.nu_factor() * tr * tr);
}

struct Sums {
  double l2 = 0.0, h1 = 0.0, h2 = 0.0, energy = 0.0;
};

double ratio(double err, double ref) { return ref > 0.0 ? std::sqrt(err / ref) : std::sqrt(err); }

}  // namespace

LevelErrors error_norms(const Eigen::VectorXd& uh, const ExactField& exact, const ActiveMesh& mesh,
                        const DofMap& dofs, const CutGeometry& geometry, const Material& mat,
                        const NitscheParams& params, int quad_degree) {
  const double h = mesh.h;
  const double k = mat.kappa();
  Sums err, ref;

  for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
    const int cell = static_cast<int>(c);
    const CellBox& box = mesh.cells[c].box;
    for (const auto& qp : active_cell_quadrature(mesh, geometry, cell, quad_degree, true)) {
      const PointState u = exact(qp.x);
      const PointState e = difference(u, discrete_state(uh, dofs, box, cell, qp.x));
      err.l2 += qp.weight * e.value * e.value;
      err.h1 += qp.weight * e.grad.squaredNorm();
      err.h2 += qp.weight * hessian_sq(e);
      ref.l2 += qp.weight * u.value * u.value;
      ref.h1 += qp.weight * u.grad.squaredNorm();
      ref.h2 += qp.weight * hessian_sq(u);
    }
    for (const auto& qp : active_cell_quadrature(mesh, geometry, cell, quad_degree, false)) {
      const PointState u = exact(qp.x);
      const PointState e = difference(u, discrete_state(uh, dofs, box, cell, qp.x));
      err.energy += qp.weight * strain_energy(e, mat);
      ref.energy += qp.weight * strain_energy(u, mat);
    }
    const int s = geometry.segment_of_cell[c];
    if (s < 0) continue;
    for (const auto& bp : boundary_quadrature(geometry.boundary.segments[s], quad_degree)) {
      const PointState u = exact(bp.x);
      const PointState e = difference(u, discrete_state(uh, dofs, box, cell, bp.x));
      const double te = traction(e, bp.normal, bp.tangent, bp.curvature, mat);
      const double tu = traction(u, bp.normal, bp.tangent, bp.curvature, mat);
      err.energy += bp.weight * (h * h * h / k * te * te + k / (h * h * h) * e.value * e.value);
      ref.energy += bp.weight * (h * h * h / k * tu * tu + k / (h * h * h) * u.value * u.value);
    }
  }

  // Ghost penalty of the error; the exact field is smooth so only u_h jumps.
  const double stab = params.stabilization_weight(mat);
  const auto& gauss = quadrature::gauss_legendre(kFaceQuadraturePoints);
  for (int f : mesh.stab_faces) {
    const Face& face = mesh.faces[f];
    const bool xn = face.normal == FaceNormal::x;
    const double length = (face.p1 - face.p0).norm();
    for (std::size_t q = 0; q < gauss.points.size(); ++q) {
      const Vec2 x = face.p0 + gauss.points[q] * (face.p1 - face.p0);
      const double w = gauss.weights[q] * length;
      const PointState a = discrete_state(uh, dofs, mesh.cells[face.first].box, face.first, x);
      const PointState b = discrete_state(uh, dofs, mesh.cells[face.second].box, face.second, x);
      const double j2 = xn ? a.xx - b.xx : a.yy - b.yy;
      const double j3 = xn ? a.xxx - b.xxx : a.yyy - b.yyy;
      err.energy += w * stab * (h * j2 * j2 + h * h * h * j3 * j3);
    }
  }

  return {ratio(err.l2, ref.l2), ratio(err.h1, ref.h1), ratio(err.h2, ref.h2),
          ratio(err.energy, ref.energy)};
}

Discretization discretize(const StudyConfig& config, double h) {
  config.material.validate();
  if (!(config.radius > 0.0)) throw ConfigError("radius must be positive");
  if (!(h > 0.0)) throw ConfigError("mesh size must be positive");
  if (config.quad_degree < 4) throw ConfigError("quadrature degree must be at least 4");

  Circle domain(config.center, config.radius);
  ExactSolution exact(config.load, config.radius, config.center, config.material);
  const NitscheParams params = config.params();
  ActiveMesh mesh = build_active_mesh(domain, h, domain.bounding_box().expanded(2.0 * h));
  if (!mesh.stabilization_reaches_cut_cells()) {
    throw GeometryError(ErrorCode::AmbiguousCut,
                        "ghost-penalty faces do not connect every cut cell to an interior cell; "
                        "mesh too coarse");
  }
  DofMap dofs = build_dof_map(mesh);
  CutGeometry geometry = build_cut_geometry(domain, mesh, config.mode);
  const double f = exact.load();
  AssembledSystem system = assemble(mesh, dofs, geometry, config.material, params,
                                    [f](const Vec2&) { return f; }, config.quad_degree);
  return {h,
          std::move(domain),
          std::move(exact),
          params,
          std::move(mesh),
          std::move(dofs),
          std::move(geometry),
          std::move(system)};
}

double fitted_slope(const std::vector<double>& h, const std::vector<double>& err) {
  const std::size_t n = h.size();
  if (n < 2 || err.size() != n) return std::numeric_limits<double>::quiet_NaN();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::log(h[i]);
    const double y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

double pair_rate(double e0, double e1, double h0, double h1) {
  return std::log(e0 / e1) / std::log(h0 / h1);
}

template <class E>
[[noreturn]] void rethrow_at_level(const E& e, int level, double h) {
  std::ostringstream msg;
  msg << "level " << level << " (h=" << h << "): " << e.what();
  throw E(e.code(), msg.str());
}

}  // namespace

StudyReport convergence_study(const StudyConfig& config, const LevelObserver& observer) {
  if (config.levels < 1) throw ConfigError("at least one level is required");
  if (!(config.h_start > 0.0)) throw ConfigError("h_start must be positive");

  StudyReport report;
  double h = config.h_start;
  for (int level = 0; level < config.levels; ++level, h *= 0.5) {
    try {
      using clock = std::chrono::steady_clock;
      const auto t0 = clock::now();
      const Discretization disc = discretize(config, h);
      const auto t1 = clock::now();
      const SolveResult sol = solve(disc.system.A, disc.system.b);
      const auto t2 = clock::now();

      LevelReport r;
      r.level = level;
      r.h = h;
      r.n_dofs = disc.dofs.n_dofs;
      r.assembly_seconds = std::chrono::duration<double>(t1 - t0).count();
      r.solve_seconds = std::chrono::duration<double>(t2 - t1).count();
      r.relative_residual = sol.relative_residual;
      r.errors = error_norms(sol.x, [&](const Vec2& x) { return disc.exact.eval(x); }, disc.mesh,
                             disc.dofs, disc.geometry, config.material, disc.params,
                             config.quad_degree);
      r.center_deflection = sample_solution(disc, sol.x, config.center);
      if (config.estimate_condition) r.condition = condition_estimate(disc.system.A, config.seed);
      if (!report.levels.empty()) {
        const LevelReport& p = report.levels.back();
        r.rates = LevelErrors{pair_rate(p.errors.l2, r.errors.l2, p.h, h),
                              pair_rate(p.errors.h1, r.errors.h1, p.h, h),
                              pair_rate(p.errors.h2b, r.errors.h2b, p.h, h),
                              pair_rate(p.errors.energy, r.errors.energy, p.h, h)};
      }
      report.levels.push_back(r);
      if (observer) observer(report.levels.back(), disc, sol.x);
    } catch (const GeometryError& e) {
      rethrow_at_level(e, level, h);
    } catch (const SolverError& e) {
      rethrow_at_level(e, level, h);
    }
  }

  if (report.levels.size() >= 2) {
    std::vector<double> hs, l2, h1, h2, en;
    for (const auto& r : report.levels) {
      hs.push_back(r.h);
      l2.push_back(r.errors.l2);
      h1.push_back(r.errors.h1);
      h2.push_back(r.errors.h2b);
      en.push_back(r.errors.energy);
    }
    report.slopes = LevelErrors{fitted_slope(hs, l2), fitted_slope(hs, h1), fitted_slope(hs, h2),
                                fitted_slope(hs, en)};
  }
  return report;
}

double sample_solution(const Discretization& disc, const Eigen::VectorXd& uh, const Vec2& x) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (disc.domain.signed_distance(x) > 0.0) return nan;
  const ActiveMesh& mesh = disc.mesh;
  const int i = static_cast<int>(std::floor((x.x() - mesh.origin.x()) / mesh.h));
  const int j = static_cast<int>(std::floor((x.y() - mesh.origin.y()) / mesh.h));
  // A point on a grid line also belongs to the cells below / left of it.
  for (const auto& [di, dj] : {std::pair{0, 0}, {-1, 0}, {0, -1}, {-1, -1}}) {
    const int cell = mesh.cell_at(i + di, j + dj);
    if (cell < 0) continue;
    const CellBox& box = mesh.cells[cell].box;
    if (box.lo.x() <= x.x() && x.x() <= box.hi.x() && box.lo.y() <= x.y() && x.y() <= box.hi.y()) {
      return evaluate(uh, mesh, disc.dofs, cell, x);
    }
  }
  return nan;
}

}  // namespace cutplate
