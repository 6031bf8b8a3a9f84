#pragma once

#include <array>
#include <string>
#include <vector>

#include "mlhp/equilibrium.hpp"
#include "mlhp/hermite_pade.hpp"
#include "mlhp/szego.hpp"

namespace mlhp {

/// One verified ratio: lhs from the polynomial pipeline, rhs from the
/// equilibrium + Szego fixed-point pipeline only.
struct ConvergenceRecord {
  std::string check;   // qpoly | kappa | mlpoly | forms | rate
  MultiIndex index;
  int j = 0;
  Complex z;           // (inf,0) for z-free checks
  Complex lhs, rhs;
  Real abs_dev = 0.0, rel_dev = 0.0;
};

ConvergenceRecord make_record(std::string check, const MultiIndex& index, int j, Complex z,
                              Complex lhs, Complex rhs);

/// Q_{n,j}(z)/Phi_j^{eta_j}(z) against G_j(z)/G_j(inf); z off Delta_j.
ConvergenceRecord zero_poly_ratio(const HpSolution& sol, const EquilibriumSolution& eq,
                                 const SzegoVector& G, int j, Complex z);

/// kappa_{n,j}/C_j^{eta_j} against G_j(inf)/sqrt(2 pi).
ConvergenceRecord kappa_ratio(const HpSolution& sol, const EquilibriumSolution& eq,
                              const SzegoVector& G, int j);

/// a_{n,j}(z)/Phi_m^{|n|}(z) against (G_m(z)/G_m(inf)) s^_{m,j+1}(z) with the
/// descending-chain transform from the reversed system; j = 0..m-1, z off
/// Delta_m (and off the chain supports).
ConvergenceRecord ml_poly_ratio(const HpSolution& sol, const EquilibriumSolution& eq,
                                const SzegoVector& G, const NikishinSystem& reversed_system,
                                int j, Complex z);

/// eps_{n,j+1} K_{n,j}^2 Phi_{j+1}^{eta_{j+1}} A_{n,j} / Phi_j^{eta_j} against
/// (G_j/G_j(inf)) (G_{j+1}(inf)/G_{j+1}) / sqrt((z-a_{j+1})(z-b_{j+1}));
/// Phi_0 = G_0 = 1; j = 0..m-1, z off Delta_j u Delta_{j+1}.
ConvergenceRecord forms_asymptotic_check(const HpSolution& sol, const EquilibriumSolution& eq,
                                         const SzegoVector& G, const NikishinSystem& system,
                                         int j, Complex z);

/// Scaled approximation error of a_{n,j}/a_{n,m} against s^_{m,j+1}. The
/// error itself is evaluated through the linear-form combination (never the
/// catastrophic direct difference); j = 0..m-1, z off the union of
/// Delta_{j+1}..Delta_m.
ConvergenceRecord rate_of_convergence_check(const HpSolution& sol, const EquilibriumSolution& eq,
                                            const SzegoVector& G, const NikishinSystem& system,
                                            const NikishinSystem& reversed_system, int j,
                                            Complex z);

/// (a_{n,j}/a_{n,m} - s^_{m,j+1})(z) via the stable combination of forms.
Complex approximation_error(const HpSolution& sol, const NikishinSystem& system,
                            const NikishinSystem& reversed_system, int j, Complex z);

/// Kernel of the Cauchy biorthogonality pairing: nested integral over the
/// middle measures of prod 1/(x_i - x_{i+1}); 1/(x1 - x2) for m = 2.
Real cauchy_kernel(const NikishinSystem& system, Real x1, Real xm);

struct BiorthogonalPair {
  std::vector<ChebSeries> P;  // P_0..P_n on Delta_1
  std::vector<ChebSeries> Q;  // Q_0..Q_n on Delta_m
  std::vector<std::vector<Real>> bimoments;  // Chebyshev bimoment matrix
  Real C(int n) const;        // pairing <P_n, Q_n>
  /// <P_k, K Q_n>. The pairing is exponentially smaller than its absolute
  /// summation scale (doubly so for m >= 3), so solves and pairing sums run
  /// in compensated double-quad arithmetic internally.
  Real pairing(int k, int n) const;

  // extended-precision internals backing the pairing evaluation:
  // coefficients as (hi, lo) double-quad pairs, bimoments in quad
  std::vector<std::vector<std::array<__float128, 2>>> pq_, qq_;
  std::vector<std::vector<__float128>> Bq_;
};

/// Monic biorthogonal families up to degree n: <P_k, K Q_l> = C_l delta_{kl}.
BiorthogonalPair biorthogonal_polys(const NikishinSystem& system, int n);

/// Default verification points: a circle of radius twice the outer radius
/// plus two real points inside every gap between consecutive intervals.
std::vector<Complex> default_test_points(const NikishinSystem& system);

struct SweepOptions {
  std::vector<Complex> test_points;  // empty = defaults
  Real tol_eq = 1e-12;
  Real tol_fp = 1e-12;
  int grid_n = 256;
  int max_sweeps = 2000;
  int max_fp_iterations = 500;
  HpOptions hp;
};

/// Full table of all ratio checks for n = k p over k_list (straight-ray
/// realizability enforced), canonically ordered by check, k, j, point.
std::vector<ConvergenceRecord> convergence_sweep(const NikishinSystem& system, const RaySpec& ray,
                                                 const std::vector<int>& k_list,
                                                 const SweepOptions& options = {});

/// Eventually-decreasing assessment: monotone after the first third of the
/// sequence with the given wobble allowance.
struct TrendSummary {
  bool eventually_decreasing = false;
  Real final_dev = 0.0;
};
TrendSummary assess_trend(std::span<const Real> deviations, Real wobble = 0.10);

}  // namespace mlhp
