#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "cutplate/cut_geometry.hpp"
#include "cutplate/mesh.hpp"
#include "cutplate/plate_forms.hpp"

namespace cutplate {

/// Simply supported circular plate under uniform load:
///   u = p R^4 / (64 kappa) (1 - (r/R)^2) ((5 + nu)/(1 + nu) - (r/R)^2).
///
/// The closed form is a quartic polynomial in (x, y) and is evaluated globally,
/// which also provides the extension outside the plate.
class ExactSolution {
 public:
  ExactSolution(double load, double radius, Vec2 center, const Material& mat);

  PointState eval(const Vec2& x) const;
  double value(const Vec2& x) const { return eval(x).value; }
  NodalData nodal(const Vec2& x) const;
  /// Right-hand side f = div div sigma(u), constant for this solution.
  double load() const;
  double center_deflection() const { return value(center_); }

  const Vec2& center() const { return center_; }
  double radius() const { return radius_; }

 private:
  double radius_;
  Vec2 center_;
  Material mat_;
  double c0_;  // constant term
  double c1_;  // coefficient of q = |x - center|^2
  double c2_;  // coefficient of q^2
};

using ExactField = std::function<PointState(const Vec2&)>;

/// Errors normalized by the same norm of the exact field.
struct LevelErrors {
  double l2 = 0.0;
  double h1 = 0.0;      // gradient seminorm
  double h2b = 0.0;     // cell-wise Hessian (Frobenius) seminorm
  double energy = 0.0;  // mesh-dependent energy norm
};

/// L2 / H1 / broken H2 on the straight-chord geometry; energy norm on the
/// curved discrete domain and boundary:
///   (sigma(e), eps(e)) + beta s_h(e, e) + h^3/kappa |T e|^2 + kappa h^-3 |e|^2.
LevelErrors error_norms(const Eigen::VectorXd& uh, const ExactField& exact, const ActiveMesh& mesh,
                        const DofMap& dofs, const CutGeometry& geometry, const Material& mat,
                        const NitscheParams& params, int quad_degree = 8);

struct StudyConfig {
  Material material;
  double load = 1.0;
  double radius = 0.5;
  Vec2 center{0.5, 0.5};
  double beta = 0.1;
  double gamma_scale = 1e2;
  BoundaryMode mode = BoundaryMode::c1_spline;
  double h_start = 0.125;
  int levels = 4;
  int quad_degree = 8;
  bool estimate_condition = false;
  std::uint64_t seed = 1;

  NitscheParams params() const { return NitscheParams::standard(material, beta, gamma_scale); }
};

/// The whole discrete problem at one mesh size.
struct Discretization {
  double h = 0.0;
  Circle domain;
  ExactSolution exact;
  NitscheParams params;
  ActiveMesh mesh;
  DofMap dofs;
  CutGeometry geometry;
  AssembledSystem system;
};

Discretization discretize(const StudyConfig& config, double h);

struct LevelReport {
  int level = 0;
  double h = 0.0;
  int n_dofs = 0;
  LevelErrors errors;
  std::optional<LevelErrors> rates;  // against the previous level
  double condition = 0.0;            // 0 when not estimated
  double solve_seconds = 0.0;
  double assembly_seconds = 0.0;
  double relative_residual = 0.0;
  double center_deflection = 0.0;
};

struct StudyReport {
  std::vector<LevelReport> levels;
  std::optional<LevelErrors> slopes;  // least-squares fit over all levels
};

/// Called after each level is solved.
using LevelObserver =
    std::function<void(const LevelReport&, const Discretization&, const Eigen::VectorXd&)>;

/// Runs discretize -> solve -> error norms for h_start, h_start/2, ...
/// Errors are rethrown with the failing level in the message.
StudyReport convergence_study(const StudyConfig& config, const LevelObserver& observer = {});

/// Least-squares slope of log(err) against log(h).
double fitted_slope(const std::vector<double>& h, const std::vector<double>& err);

/// Value of the discrete solution at x, or NaN outside the active mesh or the domain.
double sample_solution(const Discretization& disc, const Eigen::VectorXd& uh, const Vec2& x);

}  // namespace cutplate
