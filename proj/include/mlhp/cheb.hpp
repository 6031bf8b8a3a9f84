#pragma once

#include <functional>
#include <span>
#include <vector>

#include "mlhp/basics.hpp"

namespace mlhp {

/// Polynomial in the Chebyshev basis of an interval.
class ChebSeries {
 public:
  ChebSeries() = default;
  ChebSeries(Interval domain, std::vector<Real> coeffs)
      : domain_(domain), coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) coeffs_.assign(1, 0.0);
  }

  static ChebSeries constant(Interval domain, Real c) { return ChebSeries(domain, {c}); }
  static ChebSeries basis(Interval domain, int k) {
    std::vector<Real> c(k + 1, 0.0);
    c[k] = 1.0;
    return ChebSeries(domain, std::move(c));
  }

  const Interval& domain() const { return domain_; }
  const std::vector<Real>& coeffs() const { return coeffs_; }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }

  Real operator()(Real x) const;
  Complex operator()(Complex z) const;

  /// Drop trailing coefficients below rel_tol * max|coeff|.
  ChebSeries truncated(Real rel_tol = 1e-14) const;
  ChebSeries derivative() const;

  /// Multiply by the monic linear factor (x - root).
  ChebSeries times_linear(Real root) const;

  /// Divided difference q(x) = (p(x) - p(x0)) / (x - x0), a polynomial of
  /// degree deg-1 (Chebyshev synthetic division; exact, no cancellation).
  ChebSeries deflate_at(Real x0) const;

  Real max_abs_coeff() const;

  ChebSeries& operator+=(const ChebSeries& o);
  ChebSeries& operator*=(Real s);

 private:
  Interval domain_;
  std::vector<Real> coeffs_{0.0};
};

/// Chebyshev points of the second kind (endpoints included), ascending.
std::vector<Real> cheb_points_second_kind(const Interval& iv, int n);

/// Chebyshev points of the first kind (strictly interior), ascending.
std::vector<Real> cheb_points_first_kind(const Interval& iv, int n);

/// Interpolant through samples at cheb_points_second_kind(iv, n).
ChebSeries cheb_interpolate(const Interval& iv, std::span<const Real> samples);

/// Least-squares-exact fit from samples at cheb_points_first_kind(iv, n);
/// exact for polynomials of degree < n.
ChebSeries cheb_fit_first_kind(const Interval& iv, std::span<const Real> samples);

/// All real roots strictly inside the series' interval, ascending, each
/// polished by Newton on (fn, dfn). Colleague-matrix eigenvalues seed the
/// search. Throws no_convergence if polishing stalls past 50 iterations.
/// residual_scale overrides the magnitude against which the 1e-12 residual
/// target is measured (callers whose evaluator carries internal cancellation
/// pass the absolute-sum scale); default is max |fn| on a grid.
std::vector<Real> cheb_roots_in_interval(const ChebSeries& s,
                                         const std::function<Real(Real)>& fn,
                                         const std::function<Real(Real)>& dfn,
                                         Real residual_scale = 0.0);

/// Same, polishing on the series itself.
std::vector<Real> cheb_roots_in_interval(const ChebSeries& s);

/// Monic polynomial with the given roots, in the Chebyshev basis of iv.
ChebSeries monic_from_roots(const Interval& iv, std::span<const Real> roots);

}  // namespace mlhp
