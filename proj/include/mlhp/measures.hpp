#pragma once

#include <vector>

#include "mlhp/cheb.hpp"
#include "mlhp/quadrature.hpp"

namespace mlhp {

/// Absolutely continuous measure on a bounded interval with Jacobi-type
/// density rho(x) = (b-x)^alpha (x-a)^beta * modifier(x), modifier analytic
/// and strictly positive; Szego's condition then holds automatically.
class MeasureSpec {
 public:
  MeasureSpec(Interval support, Real alpha, Real beta, ChebSeries modifier,
              bool mass_normalized = true);

  const Interval& support() const { return support_; }
  Real alpha() const { return alpha_; }
  Real beta() const { return beta_; }
  const ChebSeries& modifier() const { return modifier_; }
  bool mass_normalized() const { return normalized_; }

  /// Total mass of the (possibly normalized) measure.
  Real mass() const { return normalized_ ? 1.0 : raw_mass_; }
  /// Mass of the unnormalized Jacobi-type density.
  Real raw_mass() const { return raw_mass_; }

  /// Density w.r.t. Lebesgue at an interior point.
  Real density(Real x) const;
  /// The analytic, strictly positive factor density/((b-x)^a (x-a)^b),
  /// normalization included.
  Real smooth_factor(Real x) const;

  /// Gauss rule for this measure (Jacobi rule with modifier folded into the
  /// weights). Exactness holds for degree <= 2n-1 against the full density
  /// up to the modifier's interpolation error.
  QuadratureRule rule(int n_nodes) const;

  /// Convenience: arcsine-type probability measure of an interval.
  static MeasureSpec arcsine(Interval iv);

 private:
  Interval support_;
  Real alpha_, beta_;
  ChebSeries modifier_;
  bool normalized_;
  Real raw_mass_;
};

/// Diagnostic: the Szego-condition integral of ln rho against the measure
/// d eta(x) = dx / sqrt((b-x)(x-a)); finite for every valid MeasureSpec.
Real szego_integral(const MeasureSpec& spec);

/// Adaptive Cauchy transform of the measure, relative accuracy ~1e-11.
Complex cauchy_transform(const MeasureSpec& spec, Complex z);

/// Ordered generating measures on pairwise-consecutive-disjoint intervals
/// with evaluators for the nested transforms s^_{j,k}.
///
/// Indices are 1-based like the standard notation: generators sigma_1..sigma_m,
/// s_{j,k} = <sigma_j, ..., sigma_k> for 1 <= j <= k <= m.
class NikishinSystem {
 public:
  explicit NikishinSystem(std::vector<MeasureSpec> generators, int quad_nodes = 256);

  int size() const { return static_cast<int>(gens_.size()); }
  const MeasureSpec& sigma(int j) const;              // 1-based
  const QuadratureRule& sigma_rule(int j) const;      // 1-based
  const Interval& interval(int j) const { return sigma(j).support(); }
  int quad_nodes() const { return quad_nodes_; }

  /// s^_{j,k}(z); z must be off Delta_j.
  Complex shat(int j, int k, Complex z) const;
  Complex shat_derivative(int j, int k, Complex z) const;

  /// Values of s^_{j+1,k} at the nodes of sigma_j's rule (the measure
  /// s_{j,k} as node masses is sigma_j's weights times these values);
  /// all ones for k == j.
  const std::vector<Real>& inner_density_on_nodes(int j, int k) const;

  /// Moments of s_{j,k}: integral of x^nu d s_{j,k} for nu = 0..max_degree.
  std::vector<Real> nested_moments(int j, int k, int max_degree) const;

  /// The system generated by (sigma_m, ..., sigma_1).
  NikishinSystem reversed() const;

  /// Descending-chain transform s^_{k,j} of <sigma_k, sigma_{k-1},...,sigma_j>,
  /// k >= j, evaluated through the reversed system of `rev` (which must be
  /// this->reversed()). Returns 1 for the empty chain k = j-1.
  static Complex shat_descending(const NikishinSystem& rev, int k, int j, Complex z);

 private:
  void check_indices(int j, int k) const;

  std::vector<MeasureSpec> gens_;
  int quad_nodes_;
  std::vector<QuadratureRule> rules_;
  // inner_[j-1][k-j] = values of s^_{j+1,k} at sigma_j nodes (k>j); [0] = ones
  std::vector<std::vector<std::vector<Real>>> inner_;
};

}  // namespace mlhp
