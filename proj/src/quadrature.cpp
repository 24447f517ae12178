#include "cutplate/quadrature.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cutplate::quadrature {

namespace {

constexpr int kMaxPoints = 16;

Rule1D compute_gauss(int n) {
  Rule1D rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // Newton on P_n starting from the Chebyshev-like guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // Map [-1, 1] -> [0, 1], ascending order.
    rule.points[n - 1 - i] = 0.5 * (x + 1.0);
    rule.weights[n - 1 - i] = 0.5 * w;
  }
  return rule;
}

const std::array<Rule1D, kMaxPoints + 1>& table() {
  static const std::array<Rule1D, kMaxPoints + 1> rules = [] {
    std::array<Rule1D, kMaxPoints + 1> r;
    for (int n = 1; n <= kMaxPoints; ++n) r[n] = compute_gauss(n);
    return r;
  }();
  return rules;
}

}  // namespace

const Rule1D& gauss_legendre(int n) {
  if (n < 1 || n > kMaxPoints) throw std::out_of_range("gauss_legendre: unsupported point count");
  return table()[n];
}

const Rule1D& gauss_for_degree(int degree) {
  const int n = degree < 1 ? 1 : (degree + 2) / 2;
  return gauss_legendre(n);
}

Rule2D square_rule(int degree) {
  const Rule1D& g = gauss_for_degree(degree);
  Rule2D r;
  for (std::size_t i = 0; i < g.points.size(); ++i) {
    for (std::size_t j = 0; j < g.points.size(); ++j) {
      r.xi.push_back(g.points[i]);
      r.eta.push_back(g.points[j]);
      r.weights.push_back(g.weights[i] * g.weights[j]);
    }
  }
  return r;
}

Rule2D triangle_rule(int degree) {
  // xi = u, eta = v (1 - u); the Jacobian (1 - u) raises the degree in u by one.
  const Rule1D& gu = gauss_for_degree(degree + 1);
  const Rule1D& gv = gauss_for_degree(degree);
  Rule2D r;
  for (std::size_t i = 0; i < gu.points.size(); ++i) {
    const double u = gu.points[i];
    for (std::size_t j = 0; j < gv.points.size(); ++j) {
      const double v = gv.points[j];
      r.xi.push_back(u);
      r.eta.push_back(v * (1.0 - u));
      r.weights.push_back(gu.weights[i] * gv.weights[j] * (1.0 - u));
    }
  }
  return r;
}

}  // namespace cutplate::quadrature
