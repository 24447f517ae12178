#pragma once

#include <Eigen/Core>

namespace cutplate {

using Vec2 = Eigen::Vector2d;

inline double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

// Rotation by -90 degrees; maps a counterclockwise tangent to the outward normal.
inline Vec2 rotate_cw(const Vec2& v) { return {v.y(), -v.x()}; }
inline Vec2 rotate_ccw(const Vec2& v) { return {-v.y(), v.x()}; }

struct Box {
  Vec2 lo{0.0, 0.0};
  Vec2 hi{0.0, 0.0};

  bool contains(const Vec2& x, double tol = 0.0) const {
    return x.x() >= lo.x() - tol && x.x() <= hi.x() + tol && x.y() >= lo.y() - tol &&
           x.y() <= hi.y() + tol;
  }
  bool contains(const Box& other, double tol = 0.0) const {
    return contains(other.lo, tol) && contains(other.hi, tol);
  }
  Box expanded(double margin) const {
    return {lo - Vec2(margin, margin), hi + Vec2(margin, margin)};
  }
};

}  // namespace cutplate
