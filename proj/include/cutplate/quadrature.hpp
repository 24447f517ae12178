#pragma once

#include <vector>

namespace cutplate::quadrature {

struct Rule1D {
  std::vector<double> points;  // on [0, 1]
  std::vector<double> weights;
};

struct Rule2D {
  std::vector<double> xi;
  std::vector<double> eta;
  std::vector<double> weights;
  std::size_t size() const { return weights.size(); }
};

/// n-point Gauss-Legendre rule on [0, 1]; exact for degree 2n - 1.
const Rule1D& gauss_legendre(int n);

/// Smallest Gauss-Legendre rule on [0, 1] exact for polynomials of the given degree.
const Rule1D& gauss_for_degree(int degree);

/// Tensor Gauss rule on the unit square [0, 1]^2, exact for total (and per-variable) degree.
Rule2D square_rule(int degree);

/// Collapsed (Duffy) Gauss rule on the reference triangle {xi, eta >= 0, xi + eta <= 1}.
/// Weights sum to 1/2. Exact for bivariate polynomials of total degree <= degree.
Rule2D triangle_rule(int degree);

}  // namespace cutplate::quadrature
