#include "cutplate/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cutplate/errors.hpp"
#include "cutplate/quadrature.hpp"

namespace cutplate {

// ---------------------------------------------------------------------------
// Circle

Circle::Circle(Vec2 center, double radius) : center_(std::move(center)), radius_(radius) {
  if (!(radius > 0.0)) throw ConfigError("circle radius must be positive");
}

double Circle::signed_distance(const Vec2& x) const { return (x - center_).norm() - radius_; }

Vec2 Circle::normal(const Vec2& x) const {
  const Vec2 d = x - center_;
  const double r = d.norm();
  // The center has no unique closest point; any direction will do.
  if (r == 0.0) return {1.0, 0.0};
  return d / r;
}

Vec2 Circle::closest_point(const Vec2& x) const { return center_ + radius_ * normal(x); }

double Circle::curvature(const Vec2&) const { return 1.0 / radius_; }

Box Circle::bounding_box() const {
  return {center_ - Vec2(radius_, radius_), center_ + Vec2(radius_, radius_)};
}

// ---------------------------------------------------------------------------
// Cells and perimeter crossings

Vec2 CellBox::corner(int k) const {
  switch (k & 3) {
    case 0: return lo;
    case 1: return {hi.x(), lo.y()};
    case 2: return hi;
    default: return {lo.x(), hi.y()};
  }
}

namespace {

constexpr double kRootTolerance = 1e-13;
constexpr double kGolden = 0.6180339887498949;

// Golden-section search for a local minimum of f on [0, 1].
template <class F>
double golden_minimum(F&& f) {
  double a = 0.0;
  double b = 1.0;
  double c = b - kGolden * (b - a);
  double d = a + kGolden * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < 80 && b - a > 1e-14; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kGolden * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kGolden * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

double shoelace(const std::vector<Vec2>& poly) {
  double area = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    area += cross(poly[i], poly[(i + 1) % poly.size()]);
  }
  return 0.5 * area;
}

}  // namespace

std::vector<EdgeCrossing> edge_crossings(const Domain& domain, const Vec2& p0, const Vec2& p1) {
  const Vec2 dir = p1 - p0;
  const double length = dir.norm();
  const double tol = kRootTolerance * length;
  auto g = [&](double s) { return domain.signed_distance(p0 + s * dir); };

  const double g0 = g(0.0);
  const double g1 = g(1.0);
  // The signed distance is 1-Lipschitz, so these bounds exclude any root.
  if (g0 + g1 > length + tol || g0 + g1 < -length - tol) {
    if (g0 > tol == g1 > tol) return {};
  }

  // Breakpoints: the endpoints plus interior extrema that are strictly off the boundary.
  // A touching extremum (|rho| <= tol) is a grazing contact, not a crossing.
  std::vector<std::pair<double, double>> pts{{0.0, g0}, {1.0, g1}};
  const double s_min = golden_minimum(g);
  if (const double v = g(s_min); v < -tol) pts.emplace_back(s_min, v);
  const double s_max = golden_minimum([&](double s) { return -g(s); });
  if (const double v = g(s_max); v > tol) pts.emplace_back(s_max, v);
  std::sort(pts.begin(), pts.end());

  auto inside = [&](double v) { return v <= tol; };
  std::vector<EdgeCrossing> out;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    auto [sa, ga] = pts[k];
    auto [sb, gb] = pts[k + 1];
    if (inside(ga) == inside(gb)) continue;
    const bool entering = !inside(ga);

    double root;
    if (std::abs(ga) <= tol) {
      root = sa;
    } else if (std::abs(gb) <= tol) {
      root = sb;
    } else {
      // Safeguarded Newton: keep a bracket [lo, hi] with g(lo) inside, g(hi) outside.
      double lo = entering ? sb : sa;
      double hi = entering ? sa : sb;
      double s = 0.5 * (sa + sb);
      bool converged = false;
      for (int it = 0; it < 200; ++it) {
        const double v = g(s);
        if (std::abs(v) <= tol) {
          converged = true;
          break;
        }
        if (inside(v)) {
          lo = s;
        } else {
          hi = s;
        }
        if (std::abs(hi - lo) <= 4.0 * std::numeric_limits<double>::epsilon()) {
          s = lo;
          converged = true;
          break;
        }
        const double slope = domain.normal(p0 + s * dir).dot(dir);
        double next = slope != 0.0 ? s - v / slope : 0.5 * (lo + hi);
        if (!(next > std::min(lo, hi) && next < std::max(lo, hi))) next = 0.5 * (lo + hi);
        s = next;
      }
      if (!converged) {
        throw GeometryError(ErrorCode::NoConvergence, "edge root-finding did not converge");
      }
      root = s;
    }
    out.push_back({root, p0 + root * dir, entering});
  }
  return out;
}

CellAnalysis analyze_cell(const Domain& domain, const CellBox& cell) {
  const double h = cell.h();
  const double tol = kRootTolerance * h;

  std::array<Vec2, 4> c;
  std::array<double, 4> g;
  for (int k = 0; k < 4; ++k) {
    c[k] = cell.corner(k);
    g[k] = domain.signed_distance(c[k]);
  }

  struct Event {
    Vec2 point;
    bool is_corner;
    bool inside;    // corners
    bool entering;  // crossings
  };
  std::vector<Event> events;
  int crossings = 0;
  for (int k = 0; k < 4; ++k) {
    events.push_back({c[k], true, g[k] <= tol, false});
    // Edges 0 and 1 run in increasing coordinate; 2 and 3 are evaluated on the
    // reversed (canonical) edge so that neighbours share bitwise identical roots.
    const bool reversed = k >= 2;
    const Vec2& a = reversed ? c[(k + 1) & 3] : c[k];
    const Vec2& b = reversed ? c[k] : c[(k + 1) & 3];
    auto roots = edge_crossings(domain, a, b);
    if (reversed) std::reverse(roots.begin(), roots.end());
    for (const auto& r : roots) {
      events.push_back({r.point, false, false, reversed ? !r.entering : r.entering});
      ++crossings;
    }
  }

  CellAnalysis result;
  if (crossings == 0) {
    if (g[0] <= tol) {
      result.kind = CellKind::inside;
      bool strict = true;
      for (int k = 0; k < 4; ++k) {
        const Vec2 mid = 0.5 * (c[k] + c[(k + 1) & 3]);
        strict = strict && g[k] <= -1e-12 && domain.signed_distance(mid) <= -1e-12;
      }
      result.strictly_inside = strict;
    } else if (Box{cell.lo, cell.hi}.contains(domain.bounding_box())) {
      // The whole boundary curve lies in this cell.
      result.kind = CellKind::cut;
    }
    return result;
  }
  if (crossings != 2) {
    std::ostringstream msg;
    msg << "cell [" << cell.lo.transpose() << "]-[" << cell.hi.transpose() << "] has " << crossings
        << " boundary crossings; refine h";
    throw GeometryError(ErrorCode::AmbiguousCut, msg.str());
  }

  const auto n = events.size();
  std::size_t first = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (!events[i].is_corner && events[i].entering) first = i;
  }
  if (first == n) {
    throw GeometryError(ErrorCode::AmbiguousCut, "inconsistent crossing orientation");
  }

  CellIntersection cut;
  cut.end = events[first].point;
  const double dedupe = 1e-12 * h;
  std::vector<Vec2> poly{cut.end};
  for (std::size_t step = 1; step < n; ++step) {
    const Event& e = events[(first + step) % n];
    if (e.is_corner) {
      if (!e.inside) {
        throw GeometryError(ErrorCode::AmbiguousCut, "outside corner inside the cut run");
      }
      if ((e.point - poly.back()).norm() > dedupe) poly.push_back(e.point);
      continue;
    }
    if (e.entering) {
      throw GeometryError(ErrorCode::AmbiguousCut, "inconsistent crossing orientation");
    }
    cut.start = e.point;
    if (poly.size() > 1 && (poly.back() - cut.start).norm() <= dedupe) poly.pop_back();
    poly.push_back(cut.start);
    break;
  }
  cut.polygon = std::move(poly);

  // Straight area plus the bulge of the exact arc beyond the chord start -> end.
  const Vec2 chord = cut.end - cut.start;
  double bulge = 0.0;
  const auto& gl = quadrature::gauss_legendre(5);
  for (std::size_t q = 0; q < gl.points.size(); ++q) {
    const Vec2 x = cut.start + gl.points[q] * chord;
    bulge -= gl.weights[q] * cross(chord, domain.closest_point(x) - x);
  }
  const double area =
      (cut.polygon.size() >= 3 ? shoelace(cut.polygon) : 0.0) + bulge;
  cut.area_estimate = area;

  if (area < kNegligibleAreaFraction * h * h) {
    result.kind = CellKind::outside;
    return result;
  }
  if ((cut.start - cut.end).norm() <= dedupe) {
    // Boundary touches the cell in a single point from the inside.
    result.kind = CellKind::inside;
    return result;
  }
  result.kind = CellKind::cut;
  result.intersection = std::move(cut);
  return result;
}

CellKind classify_cell(const Domain& domain, const CellBox& cell) {
  return analyze_cell(domain, cell).kind;
}

CellIntersection intersect_cell_boundary(const Domain& domain, const CellBox& cell) {
  auto analysis = analyze_cell(domain, cell);
  if (analysis.kind != CellKind::cut || !analysis.intersection) {
    throw GeometryError(ErrorCode::AmbiguousCut,
                        "cell is not cut by the boundary in exactly two points");
  }
  return std::move(*analysis.intersection);
}

// ---------------------------------------------------------------------------
// Curves

CubicCurve CubicCurve::lagrange(const Vec2& p0, const Vec2& p1, const Vec2& p2, const Vec2& p3) {
  // Nodes s = 0, 1/3, 2/3, 1 expanded into the power basis.
  return CubicCurve({p0, -5.5 * p0 + 9.0 * p1 - 4.5 * p2 + p3,
                     9.0 * p0 - 22.5 * p1 + 18.0 * p2 - 4.5 * p3,
                     -4.5 * p0 + 13.5 * p1 - 13.5 * p2 + 4.5 * p3});
}

CubicCurve CubicCurve::hermite(const Vec2& p0, const Vec2& d0, const Vec2& p1, const Vec2& d1) {
  return CubicCurve({p0, d0, -3.0 * p0 - 2.0 * d0 + 3.0 * p1 - d1, 2.0 * p0 + d0 - 2.0 * p1 + d1});
}

double CubicCurve::curvature(double s) const {
  const Vec2 d1 = derivative(s);
  const double speed = d1.norm();
  return cross(d1, second_derivative(s)) / (speed * speed * speed);
}

BoundarySegment make_segment(const Domain& domain, const CellBox& box, const CellIntersection& cut,
                             BoundaryMode mode, int cell) {
  BoundarySegment seg;
  seg.cell = cell;
  seg.start = cut.start;
  seg.end = cut.end;
  const Vec2 chord = cut.end - cut.start;
  if (mode == BoundaryMode::c0_interpolated) {
    const Vec2 q1 = domain.closest_point(cut.start + chord / 3.0);
    const Vec2 q2 = domain.closest_point(cut.start + 2.0 * chord / 3.0);
    seg.curve = CubicCurve::lagrange(cut.start, q1, q2, cut.end);
  } else {
    const double length = chord.norm();
    seg.curve = CubicCurve::hermite(cut.start, length * domain.tangent(cut.start), cut.end,
                                    length * domain.tangent(cut.end));
  }

  const double h = box.h();
  const Box neighbourhood = Box{box.lo, box.hi}.expanded(h);
  for (int k = 0; k <= 20; ++k) {
    const double s = k / 20.0;
    if (!neighbourhood.contains(seg.curve.position(s))) {
      throw GeometryError(ErrorCode::AmbiguousCut,
                          "boundary segment leaves the neighbour layer of its cell");
    }
    if (!(seg.curve.speed(s) > 1e-8 * h)) {
      throw GeometryError(ErrorCode::DegenerateTriangle, "boundary segment is not regular");
    }
  }
  return seg;
}

DiscreteBoundary assemble_boundary(std::vector<BoundarySegment> segments, BoundaryMode mode,
                                   double h) {
  DiscreteBoundary boundary;
  boundary.mode = mode;
  if (segments.empty()) return boundary;

  const double tol = 1e-10 * h;
  std::vector<bool> used(segments.size(), false);
  std::vector<BoundarySegment> loop;
  loop.reserve(segments.size());
  std::size_t current = 0;
  used[0] = true;
  loop.push_back(segments[0]);
  for (std::size_t k = 1; k < segments.size(); ++k) {
    const Vec2 tail = segments[current].end;
    std::size_t best = segments.size();
    double best_dist = tol;
    for (std::size_t j = 0; j < segments.size(); ++j) {
      if (used[j]) continue;
      const double d = (segments[j].start - tail).norm();
      if (d <= best_dist) {
        best = j;
        best_dist = d;
      }
    }
    if (best == segments.size()) {
      throw GeometryError(ErrorCode::AmbiguousCut,
                          "discrete boundary is not a single closed loop");
    }
    used[best] = true;
    current = best;
    loop.push_back(segments[best]);
  }
  if ((loop.back().end - loop.front().start).norm() > tol) {
    throw GeometryError(ErrorCode::AmbiguousCut, "discrete boundary does not close");
  }

  for (std::size_t k = 0; k < loop.size(); ++k) {
    const BoundarySegment& prev = loop[k];
    const BoundarySegment& next = loop[(k + 1) % loop.size()];
    const Vec2 t0 = prev.tangent(1.0);
    const Vec2 t1 = next.tangent(0.0);
    const double angle = std::abs(std::atan2(cross(t0, t1), t0.dot(t1)));
    if (angle > kCornerAngleTolerance) {
      boundary.corners.push_back(
          {next.start, {prev.normal(1.0), t0}, {next.normal(0.0), t1}, angle});
    }
  }
  boundary.segments = std::move(loop);
  return boundary;
}

// ---------------------------------------------------------------------------
// Cut-cell decomposition

Vec2 CutTriangle::map(double xi, double eta) const {
  const auto& [v0, v1, v2] = vertices;
  switch (kind) {
    case PatchKind::straight:
      return v0 + xi * (v1 - v0) + eta * (v2 - v0);
    case PatchKind::curved: {
      // Linear map plus a cubic bubble that vanishes on the two straight sides and
      // reproduces the curve on the side v1 -> v2 (parameter s = eta).
      const auto& a = curve.coefficients();
      const Vec2 p = -a[3] - a[2];
      const Vec2 q = -a[3];
      return v0 + xi * (v1 - v0) + eta * (v2 - v0) + xi * eta * (p * (xi + eta) + q * eta);
    }
    case PatchKind::cap: {
      // Ruled map between the chord v1 -> v2 (eta = 0) and the curve (eta = 1).
      const Vec2 chord = (1.0 - xi) * v1 + xi * v2;
      return chord + eta * (curve.position(xi) - chord);
    }
  }
  return v0;
}

double CutTriangle::jacobian(double xi, double eta) const {
  const auto& [v0, v1, v2] = vertices;
  switch (kind) {
    case PatchKind::straight:
      return cross(v1 - v0, v2 - v0);
    case PatchKind::curved: {
      const auto& a = curve.coefficients();
      const Vec2 p = -a[3] - a[2];
      const Vec2 q = -a[3];
      const Vec2 dxi = v1 - v0 + eta * (p * (xi + eta) + q * eta) + xi * eta * p;
      const Vec2 deta = v2 - v0 + xi * (p * (xi + eta) + q * eta) + xi * eta * (p + q);
      return cross(dxi, deta);
    }
    case PatchKind::cap: {
      const Vec2 chord = (1.0 - xi) * v1 + xi * v2;
      const Vec2 dxi = (1.0 - eta) * (v2 - v1) + eta * curve.derivative(xi);
      const Vec2 deta = curve.position(xi) - chord;
      // The domain lies left of the curve, so the chord is on the left: orient positively.
      return cross(deta, dxi);
    }
  }
  return 0.0;
}

namespace {

double min_jacobian(const CutTriangle& tri, const quadrature::Rule2D& rule) {
  if (tri.kind == PatchKind::straight) return tri.jacobian(0.0, 0.0);
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t q = 0; q < rule.size(); ++q) {
    m = std::min(m, tri.jacobian(rule.xi[q], rule.eta[q]));
  }
  return m;
}

}  // namespace

CutCellDecomposition decompose_cut_cell(const CellIntersection& cut, const BoundarySegment& segment,
                                        double h, bool curved) {
  CutCellDecomposition dec;
  dec.cell = segment.cell;
  const auto& poly = cut.polygon;  // end, corners..., start
  const std::size_t m = poly.size() - 1;

  if (m < 2) {
    if (curved) {
      CutTriangle cap{PatchKind::cap, {0.5 * (cut.start + cut.end), cut.start, cut.end},
                      segment.curve};
      const auto rule = quadrature::square_rule(8);
      if (!(min_jacobian(cap, rule) > 0.0)) {
        throw GeometryError(ErrorCode::DegenerateTriangle, "cap patch with non-positive Jacobian");
      }
      dec.triangles.push_back(cap);
    }
    return dec;
  }

  const auto rule = quadrature::triangle_rule(8);
  const double tiny = 2.0 * 1e-14 * h * h;  // Jacobian of a triangle of area 1e-14 h^2
  double best_score = -std::numeric_limits<double>::infinity();
  std::vector<CutTriangle> best;
  for (std::size_t apex = 1; apex < m; ++apex) {
    std::vector<CutTriangle> tris;
    const Vec2& v = poly[apex];
    for (std::size_t i = 0; i < m; ++i) {
      if (i + 1 == apex || i == apex) continue;
      tris.push_back({PatchKind::straight, {v, poly[i], poly[i + 1]}, {}});
    }
    tris.push_back({curved ? PatchKind::curved : PatchKind::straight,
                    {v, cut.start, cut.end},
                    segment.curve});
    double score = std::numeric_limits<double>::infinity();
    for (const auto& t : tris) score = std::min(score, min_jacobian(t, rule));
    if (score > best_score) {
      best_score = score;
      best = std::move(tris);
    }
  }
  if (!(best_score > tiny)) {
    throw GeometryError(ErrorCode::DegenerateTriangle,
                        "no fan triangulation of the cut cell avoids degenerate triangles");
  }
  dec.triangles = std::move(best);
  return dec;
}

// ---------------------------------------------------------------------------
// Quadrature

AreaQuadrature area_quadrature(const CutCellDecomposition& decomposition, int degree) {
  AreaQuadrature pts;
  const auto tri = quadrature::triangle_rule(degree);
  const auto sq = quadrature::square_rule(degree);
  for (const auto& t : decomposition.triangles) {
    const auto& rule = t.kind == PatchKind::cap ? sq : tri;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      pts.push_back({t.map(rule.xi[q], rule.eta[q]),
                     rule.weights[q] * std::abs(t.jacobian(rule.xi[q], rule.eta[q]))});
    }
  }
  return pts;
}

AreaQuadrature cell_quadrature(const CellBox& cell, int degree) {
  const auto rule = quadrature::square_rule(degree);
  const Vec2 size = cell.hi - cell.lo;
  const double jac = size.x() * size.y();
  AreaQuadrature pts;
  pts.reserve(rule.size());
  for (std::size_t q = 0; q < rule.size(); ++q) {
    pts.push_back({cell.lo + Vec2(rule.xi[q] * size.x(), rule.eta[q] * size.y()),
                   rule.weights[q] * jac});
  }
  return pts;
}

BoundaryQuadrature boundary_quadrature(const BoundarySegment& segment, int degree) {
  const auto& rule = quadrature::gauss_for_degree(degree);
  BoundaryQuadrature pts;
  pts.reserve(rule.points.size());
  for (std::size_t q = 0; q < rule.points.size(); ++q) {
    const double s = rule.points[q];
    const double speed = segment.curve.speed(s);
    pts.push_back({segment.position(s), rule.weights[q] * speed, segment.normal(s),
                   segment.tangent(s), segment.curvature(s), speed});
  }
  return pts;
}

}  // namespace cutplate
