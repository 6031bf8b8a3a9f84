#pragma once

#include <vector>

#include "mlhp/cheb.hpp"

namespace mlhp {

/// A straight-ray direction vector: p_1 > 0, nonincreasing, summing to 1,
/// with prefix sums P_j.
struct RaySpec {
  std::vector<Real> p;
  std::vector<Real> P;

  static RaySpec create(std::vector<Real> p);
  int size() const { return static_cast<int>(p.size()); }
  /// P_j with the boundary convention P_0 = P_{m+1} = 0 (1-based j).
  Real P_at(int j) const {
    if (j < 1 || j > size()) return 0.0;
    return P[j - 1];
  }
};

/// Tridiagonal interaction matrix: diagonal P_j^2, off-diagonal -P_j P_{j+1}/2.
std::vector<std::vector<Real>> interaction_matrix(const RaySpec& ray);
Real interaction_matrix_min_eigenvalue(const RaySpec& ray);

/// Measure as weighted point masses (sources for balayage).
struct DiscreteMeasure {
  std::vector<Real> points;
  std::vector<Real> masses;
  Real mass() const {
    Real s = 0;
    for (Real m : masses) s += m;
    return s;
  }
};

/// Density values w.r.t. Lebesgue at the first-kind Chebyshev grid of an interval.
struct GridDensity {
  Interval interval;
  std::vector<Real> values;
};

/// Balayage of `source` onto `target` (disjoint from all source points):
/// density (1/(pi sqrt((b-x)(x-a)))) * sum_i m_i sqrt|(t_i-a)(t_i-b)| / |t_i-x|.
/// Mass-preserving.
GridDensity balayage_onto(const DiscreteMeasure& source, const Interval& target, int grid_n = 256);

/// The smooth factor of the balayage against the arcsine weight of `target`:
/// u(x) with density u(x)/(pi sqrt((b-x)(x-a))), at the given points.
std::vector<Real> balayage_factor(const DiscreteMeasure& source, const Interval& target,
                                  std::span<const Real> eval_points);

/// Solution of the vector equilibrium problem on consecutive-disjoint
/// intervals: densities lambda_j' = u_j(x)/(pi sqrt((b_j-x)(x-a_j))),
/// Robin constants omega_j, and evaluators for V^{lambda_j} and Phi_j.
class EquilibriumSolution {
 public:
  EquilibriumSolution(std::vector<Interval> intervals, RaySpec ray,
                      std::vector<std::vector<Real>> u_values, int grid_n);

  int size() const { return static_cast<int>(intervals_.size()); }
  const Interval& interval(int j) const { return intervals_.at(j - 1); }
  const RaySpec& ray() const { return ray_; }
  int grid_size() const { return grid_n_; }

  const std::vector<Real>& density_factor_values(int j) const { return u_vals_.at(j - 1); }
  const ChebSeries& density_factor(int j) const { return u_series_.at(j - 1); }

  /// Unit-mass check value: the Chebyshev mean coefficient of u_j.
  Real mass(int j) const;

  /// Logarithmic potential V^{lambda_j}(z); finite everywhere, valid on the
  /// interval itself (evaluated through the Chebyshev-log expansion).
  Real potential(int j, Complex z) const;

  /// Comparison function Phi_j(z) = exp(-V - i V~), single-valued and
  /// analytic off Delta_j with a simple pole at infinity; z must be off Delta_j.
  Complex phi(int j, Complex z) const;

  Real omega(int j) const { return omega_.at(j - 1); }
  Real robin_constant(int j) const { return omega_.at(j - 1); }
  /// C_j = e^{omega_j}.
  Real growth_constant(int j) const { return std::exp(omega_.at(j - 1)); }

  const std::vector<Real>& sweep_residuals() const { return sweep_residuals_; }
  Real omega_quartile_spread(int j) const { return omega_spread_.at(j - 1); }

  // solver bookkeeping
  void set_iteration_report(std::vector<Real> residuals) { sweep_residuals_ = std::move(residuals); }

 private:
  void finalize();  // fit series, compute omegas

  std::vector<Interval> intervals_;
  RaySpec ray_;
  int grid_n_;
  std::vector<std::vector<Real>> u_vals_;
  std::vector<ChebSeries> u_series_;
  std::vector<Real> omega_;
  std::vector<Real> omega_spread_;
  std::vector<Real> sweep_residuals_;
};

/// Fixed point of the balayage sweep
///   lambda_j <- 1/2 Bal(tau_j, Delta_j) + (1 - c_j/2) arcsine(Delta_j),
/// tau_j = (P_{j-1}/P_j) lambda_{j-1} + (P_{j+1}/P_j) lambda_{j+1}.
/// Converged when the sup change of the density factors drops below tol.
EquilibriumSolution solve_vector_equilibrium(const std::vector<Interval>& intervals,
                                             const RaySpec& ray, Real tol, int max_sweeps,
                                             int grid_n = 256, Real damping = 1.0);

/// Max residual of the equilibrium equality over per-interval grids.
Real equilibrium_residual(const EquilibriumSolution& sol);

}  // namespace mlhp
