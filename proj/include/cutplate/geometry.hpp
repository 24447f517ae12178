#pragma once

#include <array>
#include <optional>
#include <vector>

#include "cutplate/core.hpp"

namespace cutplate {

/// Smooth planar domain described by its signed distance function.
///
/// The boundary quantities (normal, tangent, curvature) are evaluated at the
/// closest boundary point p(x) of the query point, so they are defined on the
/// whole tubular neighbourhood of the boundary.
class Domain {
 public:
  virtual ~Domain() = default;

  /// Negative inside, positive outside, zero on the boundary.
  virtual double signed_distance(const Vec2& x) const = 0;
  virtual Vec2 closest_point(const Vec2& x) const = 0;
  /// Outward unit normal n(p(x)).
  virtual Vec2 normal(const Vec2& x) const = 0;
  /// Counterclockwise unit tangent t(p(x)).
  Vec2 tangent(const Vec2& x) const { return rotate_ccw(normal(x)); }
  /// Signed curvature at p(x), positive for a convex boundary traversed counterclockwise.
  virtual double curvature(const Vec2& x) const = 0;
  virtual Box bounding_box() const = 0;
};

class Circle final : public Domain {
 public:
  Circle(Vec2 center, double radius);

  double signed_distance(const Vec2& x) const override;
  Vec2 closest_point(const Vec2& x) const override;
  Vec2 normal(const Vec2& x) const override;
  double curvature(const Vec2& x) const override;
  Box bounding_box() const override;

  const Vec2& center() const { return center_; }
  double radius() const { return radius_; }

 private:
  Vec2 center_;
  double radius_;
};

/// Axis-aligned square background cell. Corners are stored, not recomputed,
/// so that neighbouring cells see bitwise identical shared edges.
struct CellBox {
  Vec2 lo;
  Vec2 hi;

  double h() const { return hi.x() - lo.x(); }
  Vec2 center() const { return 0.5 * (lo + hi); }
  /// Counterclockwise corners: 0 = SW, 1 = SE, 2 = NE, 3 = NW.
  Vec2 corner(int k) const;
};

enum class CellKind { inside, cut, outside };

/// Where the exact boundary crosses the perimeter of one cell.
///
/// The boundary arc inside the cell runs counterclockwise (domain on the left)
/// from `start` to `end`. `polygon` is the straight part of the cut region:
/// `end`, the cell corners inside the domain, then `start`, counterclockwise.
struct CellIntersection {
  Vec2 start;
  Vec2 end;
  std::vector<Vec2> polygon;
  double area_estimate = 0.0;
};

struct CellAnalysis {
  CellKind kind = CellKind::outside;
  /// Every corner and edge midpoint strictly inside and no perimeter crossing.
  bool strictly_inside = false;
  /// Present for cut cells with the two-point intersection property. A cut cell
  /// without it contains the whole boundary curve.
  std::optional<CellIntersection> intersection;
};

/// Cut cells whose region is smaller than this fraction of h^2 are treated as outside.
inline constexpr double kNegligibleAreaFraction = 1e-12;

CellAnalysis analyze_cell(const Domain& domain, const CellBox& cell);
CellKind classify_cell(const Domain& domain, const CellBox& cell);
/// Throws GeometryError(AmbiguousCut) unless the cell is cut in exactly two points.
CellIntersection intersect_cell_boundary(const Domain& domain, const CellBox& cell);

struct EdgeCrossing {
  double s = 0.0;  // parameter along p0 -> p1
  Vec2 point;
  bool entering = false;  // true when the edge goes from outside to inside
};

/// Roots of the signed distance along the segment p0 -> p1, to |rho| <= 1e-13 h.
std::vector<EdgeCrossing> edge_crossings(const Domain& domain, const Vec2& p0, const Vec2& p1);

/// Parametric cubic c(s) = a0 + a1 s + a2 s^2 + a3 s^3 on [0, 1].
class CubicCurve {
 public:
  CubicCurve() = default;
  explicit CubicCurve(std::array<Vec2, 4> coefficients) : a_(coefficients) {}

  static CubicCurve lagrange(const Vec2& p0, const Vec2& p1, const Vec2& p2, const Vec2& p3);
  static CubicCurve hermite(const Vec2& p0, const Vec2& d0, const Vec2& p1, const Vec2& d1);

  Vec2 position(double s) const { return a_[0] + s * (a_[1] + s * (a_[2] + s * a_[3])); }
  Vec2 derivative(double s) const { return a_[1] + s * (2.0 * a_[2] + 3.0 * s * a_[3]); }
  Vec2 second_derivative(double s) const { return 2.0 * a_[2] + 6.0 * s * a_[3]; }

  double speed(double s) const { return derivative(s).norm(); }
  Vec2 tangent(double s) const { return derivative(s).normalized(); }
  /// Right-hand normal of the direction of travel; outward for a counterclockwise boundary.
  Vec2 normal(double s) const { return rotate_cw(tangent(s)); }
  /// (c' x c'') / |c'|^3.
  double curvature(double s) const;

  const std::array<Vec2, 4>& coefficients() const { return a_; }

 private:
  std::array<Vec2, 4> a_{Vec2::Zero(), Vec2::Zero(), Vec2::Zero(), Vec2::Zero()};
};

enum class BoundaryMode { c0_interpolated, c1_spline };

struct BoundarySegment {
  int cell = -1;  // owning active cell
  CubicCurve curve;
  Vec2 start;
  Vec2 end;

  Vec2 position(double s) const { return curve.position(s); }
  Vec2 normal(double s) const { return curve.normal(s); }
  Vec2 tangent(double s) const { return curve.tangent(s); }
  double curvature(double s) const { return curve.curvature(s); }
};

/// Frame (normal, tangent) of a boundary curve at one point.
struct Frame {
  Vec2 normal;
  Vec2 tangent;
};

/// A kink of the discrete boundary: the end of one segment meeting the start of the next.
struct CornerPoint {
  Vec2 location;
  Frame minus;  // end of the incoming segment
  Frame plus;   // start of the outgoing segment
  double angle = 0.0;
};

struct DiscreteBoundary {
  BoundaryMode mode = BoundaryMode::c1_spline;
  std::vector<BoundarySegment> segments;  // counterclockwise, closed loop
  std::vector<CornerPoint> corners;
};

/// Tangent jumps above this angle (radians) count as corners.
inline constexpr double kCornerAngleTolerance = 1e-10;

/// Cubic approximation of the boundary arc crossing one cut cell.
///
/// C0: interpolates the exact boundary at the intersection points and at the
/// closest-point projections of the chord points at 1/3 and 2/3.
/// C1: Hermite cubic through the intersection points with the exact tangent
/// directions there, scaled by the chord length.
/// Throws GeometryError if the curve leaves the one-cell neighbourhood of its cell.
BoundarySegment make_segment(const Domain& domain, const CellBox& box, const CellIntersection& cut,
                             BoundaryMode mode, int cell);

/// Orders segments into a closed counterclockwise loop and collects the corner set.
DiscreteBoundary assemble_boundary(std::vector<BoundarySegment> segments, BoundaryMode mode,
                                   double h);

enum class PatchKind {
  straight,  // plain triangle
  curved,    // cubic triangle: edge vertices[1] -> vertices[2] follows the curve
  cap,       // region between a straight chord vertices[2] -> vertices[1] and the curve
};

/// One integration patch of a cut cell, mapped from a reference element.
///
/// straight / curved patches use the reference triangle (xi, eta); caps use the
/// unit square.
struct CutTriangle {
  PatchKind kind = PatchKind::straight;
  std::array<Vec2, 3> vertices;
  CubicCurve curve;

  Vec2 map(double xi, double eta) const;
  /// Determinant of the reference-to-physical Jacobian.
  double jacobian(double xi, double eta) const;
  double reference_measure() const { return kind == PatchKind::cap ? 1.0 : 0.5; }
};

struct CutCellDecomposition {
  int cell = -1;
  std::vector<CutTriangle> triangles;
};

/// Fan triangulation of the cut region. With `curved` the triangle on the chord
/// is replaced by a cubic triangle along the segment curve.
CutCellDecomposition decompose_cut_cell(const CellIntersection& cut, const BoundarySegment& segment,
                                        double h, bool curved = true);

struct QuadPoint {
  Vec2 x;
  double weight = 0.0;
};

struct BoundaryQuadPoint {
  Vec2 x;
  double weight = 0.0;  // includes |c'(s)|
  Vec2 normal;
  Vec2 tangent;
  double curvature = 0.0;
  double speed = 0.0;
};

using AreaQuadrature = std::vector<QuadPoint>;
using BoundaryQuadrature = std::vector<BoundaryQuadPoint>;

AreaQuadrature area_quadrature(const CutCellDecomposition& decomposition, int degree);
AreaQuadrature cell_quadrature(const CellBox& cell, int degree);
BoundaryQuadrature boundary_quadrature(const BoundarySegment& segment, int degree);

}  // namespace cutplate
