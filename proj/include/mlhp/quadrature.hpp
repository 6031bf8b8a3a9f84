#pragma once

#include <span>
#include <vector>

#include "mlhp/basics.hpp"

namespace mlhp {

/// Nodes strictly inside the owning interval, positive weights.
struct QuadratureRule {
  Interval interval;
  std::vector<Real> nodes;
  std::vector<Real> weights;

  Real mass() const {
    Real s = 0.0;
    for (Real w : weights) s += w;
    return s;
  }
  int size() const { return static_cast<int>(nodes.size()); }
};

/// Gauss rule for the weight (b-x)^alpha (x-a)^beta on [a,b]; exact for
/// polynomials of degree <= 2 n_nodes - 1.
QuadratureRule gauss_jacobi_rule(const Interval& iv, Real alpha, Real beta, int n_nodes);

/// Sum of w_i rho(x_i) / (z - x_i). Accuracy is the caller's business: the
/// rule must be sized for dist(z, interval).
Complex cauchy_integral(const QuadratureRule& rule, std::span<const Real> density_values,
                        Complex z);

/// d/dz of cauchy_integral.
Complex cauchy_integral_derivative(const QuadratureRule& rule, std::span<const Real> density_values,
                                   Complex z);

}  // namespace mlhp
