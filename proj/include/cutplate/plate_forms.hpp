#pragma once

#include <functional>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "cutplate/bfs_basis.hpp"
#include "cutplate/cut_geometry.hpp"
#include "cutplate/mesh.hpp"

namespace cutplate {

/// Kirchhoff material. The bending law is
///   sigma = kappa (H + nu/(1-nu) tr(H) I),  kappa = E t^3 / (12 (1 + nu)),
/// which is the classical D[(1-nu) H + nu tr(H) I] with D = E t^3 / (12 (1 - nu^2)).
struct Material {
  double E = 1e2;
  double nu = 0.3;
  double t = 1e-1;

  double kappa() const { return E * t * t * t / (12.0 * (1.0 + nu)); }
  double nu_factor() const { return nu / (1.0 - nu); }
  /// Flexural rigidity D = kappa / (1 - nu).
  double rigidity() const { return kappa() / (1.0 - nu); }
  void validate() const;
};

struct NitscheParams {
  double beta = 0.1;
  double gamma = 0.0;
  /// Multiply the ghost penalty by kappa so that it scales with the material.
  bool beta_scaled_by_kappa = true;

  /// beta and gamma = gamma_scale * (2 kappa + 2 kappa nu/(1-nu)).
  static NitscheParams standard(const Material& mat, double beta = 0.1, double gamma_scale = 1e2);
  double stabilization_weight(const Material& mat) const {
    return beta_scaled_by_kappa ? beta * mat.kappa() : beta;
  }
};

/// Derivatives of a scalar field at one point, symmetric storage.
struct PointState {
  double value = 0.0;
  Vec2 grad{0.0, 0.0};
  double xx = 0.0, xy = 0.0, yy = 0.0;
  double xxx = 0.0, xxy = 0.0, xyy = 0.0, yyy = 0.0;

  /// State of shape function k from a basis evaluation.
  static PointState from_basis(const BasisEval& basis, int k);
};

/// Moment tensor sigma(grad v) = M(v).
Eigen::Matrix2d stress(const PointState& state, const Material& mat);

/// Effective boundary shear T(v) = (M . grad)_n + d/ds M_nt on a curve with unit
/// normal n, unit tangent t and curvature `curvature` (positive when the tangent
/// turns towards -n, i.e. a convex boundary traversed counterclockwise).
double traction(const PointState& state, const Vec2& n, const Vec2& t, double curvature,
                const Material& mat);

struct AssemblyTerms {
  bool interior = true;
  bool nitsche = true;  // (T v, w) + (v, T w)
  bool penalty = true;  // gamma h^-3 (v, w)
  bool stabilization = true;
};

using SparseMatrix = Eigen::SparseMatrix<double>;

struct AssembledSystem {
  SparseMatrix A;
  Eigen::VectorXd b;
  SparseMatrix interior;
  SparseMatrix nitsche;
  SparseMatrix penalty;
  SparseMatrix stabilization;  // already weighted by the stabilization weight
};

using ScalarField = std::function<double(const Vec2&)>;

/// Assembles A_h = a_h + beta s_h and the load vector over the discrete domain.
AssembledSystem assemble(const ActiveMesh& mesh, const DofMap& dofs, const CutGeometry& geometry,
                         const Material& mat, const NitscheParams& params, const ScalarField& load,
                         int quad_degree = 8, AssemblyTerms terms = {});

struct QuadraticForm {
  Eigen::VectorXd Av;
  double total = 0.0;
  double interior = 0.0;
  double nitsche = 0.0;
  double penalty = 0.0;
  double stabilization = 0.0;
};

QuadraticForm apply_operator(const AssembledSystem& system, const Eigen::VectorXd& v);

/// Points per face used by the ghost-penalty integrals.
inline constexpr int kFaceQuadraturePoints = 4;

/// Number of worker threads: CUTPLATE_THREADS if set, else the hardware concurrency.
unsigned worker_count();

}  // namespace cutplate
