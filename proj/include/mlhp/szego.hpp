#pragma once

#include <vector>

#include "mlhp/measures.hpp"

namespace mlhp {

/// Szego function of a weight mu' on an interval: the outer-type function on
/// the slit plane with |G(x+i0)|^2 = 1 / (sqrt((b-x)(x-a)) mu'(x)).
///
/// Internally G is stored through u(x) = ln(sqrt((b-x)(x-a)) mu'(x)) split as
///   u = gamma_b ln(b-x) + gamma_a ln(x-a) + s(x),   s analytic,
/// for which the defining integral has closed-form Chebyshev modes:
///   G(z) = ((b-a)/4)^{-(gamma_a+gamma_b)/2} e^{-s_0/2}
///          (1 - 1/psi)^{-gamma_b} (1 + 1/psi)^{-gamma_a}
///          exp(-1/2 sum_{k>=1} s_k psi^{-k}),
/// psi the exterior Joukowski coordinate. Boundary moduli always come from u,
/// never from near-axis evaluation.
class SzegoFunction {
 public:
  SzegoFunction() = default;
  SzegoFunction(Interval iv, Real gamma_b, Real gamma_a, ChebSeries smooth_log);

  /// Jacobi-type measure: endpoint exponents handled exactly.
  static SzegoFunction from_measure(const MeasureSpec& spec, int grid_n = 256);

  /// General positive weight sampled at cheb_points_first_kind(iv, n). The
  /// endpoint split (none vs. the sqrt factor) is chosen by tail decay.
  static SzegoFunction from_weight_samples(const Interval& iv, std::span<const Real> samples);

  const Interval& interval() const { return iv_; }

  Complex eval(Complex z) const;   // z off the interval
  Real eval_real(Real x) const;    // real x off the interval (positive)
  Real eval_inf() const;

  /// u(x) = ln(sqrt((b-x)(x-a)) mu'(x)) at an interior point.
  Real boundary_log_weight(Real x) const;
  /// |G(x+i0)|^2 = exp(-u(x)).
  Real boundary_sq_modulus(Real x) const { return std::exp(-boundary_log_weight(x)); }

 private:
  Interval iv_;
  Real gamma_b_ = 0.0, gamma_a_ = 0.0;
  ChebSeries smooth_;
  Real log_const_ = 0.0;  // ln G(inf)
};

/// Sample-based entry point; weight samples at first-kind Chebyshev points.
Complex szego_function(const Interval& iv, std::span<const Real> weight_samples, Complex z);
Real szego_function_inf(const Interval& iv, std::span<const Real> weight_samples);

/// Bounded harmonic function on the complement of the interval with the given
/// boundary samples (first-kind grid), via the exterior Poisson kernel in the
/// Joukowski coordinate.
Real harmonic_extension(const Interval& iv, std::span<const Real> boundary_samples, Complex z);
Real harmonic_extension_inf(const Interval& iv, std::span<const Real> boundary_samples);

/// Positive vector function on the neighbor grids: component j carries
/// samples of f_j on Delta_{j-1} (left) and Delta_{j+1} (right).
class BoundaryVectorFunction {
 public:
  BoundaryVectorFunction() = default;
  static BoundaryVectorFunction ones(const std::vector<Interval>& intervals, int grid_n);

  int size() const { return static_cast<int>(intervals_.size()); }
  int grid_size() const { return grid_n_; }
  const std::vector<Interval>& intervals() const { return intervals_; }

  const std::vector<Real>& left(int j) const { return left_.at(j - 1); }    // on Delta_{j-1}
  const std::vector<Real>& right(int j) const { return right_.at(j - 1); }  // on Delta_{j+1}
  std::vector<Real>& left(int j) { return left_.at(j - 1); }
  std::vector<Real>& right(int j) { return right_.at(j - 1); }

  bool same_geometry(const BoundaryVectorFunction& o) const;
  void check_positive() const;

 private:
  std::vector<Interval> intervals_;
  int grid_n_ = 0;
  std::vector<std::vector<Real>> left_, right_;
};

/// sup-log distance: max_j || ln(f_j/g_j) ||_{ Delta_{j-1} u Delta_{j+1} }.
Real metric_d(const BoundaryVectorFunction& f, const BoundaryVectorFunction& g);

/// The vector weight w_j = sqrt((b_j-x)(x-a_j)) h~_j(x) sigma_j'(x), with
/// h~_j = 1/sqrt(|x-b_{j+1}||x-a_{j+1}|) for j < m and h~_m = 1. Stores the
/// endpoint exponents exactly and the smooth log part on the grid.
class SzegoWeightVector {
 public:
  static SzegoWeightVector from_system(const NikishinSystem& system, int grid_n = 256);
  /// Custom weights for tests: per component, endpoint exponents of u and
  /// smooth log-weight samples on the first-kind grid.
  static SzegoWeightVector custom(std::vector<Interval> intervals, std::vector<Real> gamma_b,
                                  std::vector<Real> gamma_a,
                                  std::vector<std::vector<Real>> smooth_log, int grid_n);

  int size() const { return static_cast<int>(intervals_.size()); }
  int grid_size() const { return grid_n_; }
  const std::vector<Interval>& intervals() const { return intervals_; }
  Real gamma_b(int j) const { return gamma_b_.at(j - 1); }
  Real gamma_a(int j) const { return gamma_a_.at(j - 1); }
  const std::vector<Real>& smooth_log(int j) const { return smooth_log_.at(j - 1); }
  /// w_j at the grid points (diagnostic surface).
  std::vector<Real> weight_values(int j) const;

 private:
  std::vector<Interval> intervals_;
  int grid_n_ = 0;
  std::vector<Real> gamma_b_, gamma_a_;
  std::vector<std::vector<Real>> smooth_log_;  // ln(smooth part of w_j)
};

/// One application of T_w: component j is the Szego function on the slit
/// plane of Delta_j with |T_j f|^2 = f_{j-1} f_{j+1} / w_j on Delta_j,
/// resampled on the neighbor grids. Also returns the Szego functions.
struct TApplication {
  BoundaryVectorFunction boundary;
  std::vector<SzegoFunction> components;
};
TApplication apply_T_full(const SzegoWeightVector& w, const BoundaryVectorFunction& f);
BoundaryVectorFunction apply_T(const SzegoWeightVector& w, const BoundaryVectorFunction& f);

/// Contraction factor of T^{ceil(m/2)} (exact rational).
struct ContractionConstant {
  long num;
  long den;
  Real value() const { return Real(num) / Real(den); }
};
ContractionConstant contraction_constant(int m);

/// Fixed point G = (G_1,...,G_m) of T_w with per-iteration distances.
struct SzegoVector {
  std::vector<SzegoFunction> G;
  BoundaryVectorFunction boundary;      // fixed-point boundary samples
  std::vector<Real> iteration_distances;

  int size() const { return static_cast<int>(G.size()); }
  Complex eval(int j, Complex z) const { return G.at(j - 1).eval(z); }
  Real eval_inf(int j) const { return G.at(j - 1).eval_inf(); }
  Real boundary_sq_modulus(int j, Real x) const { return G.at(j - 1).boundary_sq_modulus(x); }
};

SzegoVector fixed_point_T(const SzegoWeightVector& w, Real tol, int max_iter);

/// Max scaled residual of the boundary-value system
///   |G_j|^2 sqrt((b_j-x)(x-a_j)) sigma_j' = sqrt(|x-b_{j+1}||x-a_{j+1}|) G_{j-1} G_{j+1}
/// over interior grids (the j=m factor is 1; G_0 = G_{m+1} = 1).
Real boundcond_residual(const SzegoVector& G, const NikishinSystem& system);

}  // namespace mlhp
