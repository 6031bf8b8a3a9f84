#pragma once

#include <optional>
#include <vector>

#include "mlhp/measures.hpp"

namespace mlhp {

/// Multi-index n = (n_1,...,n_m), nonnegative, not all zero.
struct MultiIndex {
  std::vector<int> n;

  static MultiIndex create(std::vector<int> n);
  int components() const { return static_cast<int>(n.size()); }
  int total() const;           // |n|
  int eta(int j) const;        // n_1 + ... + n_j (0 for j <= 0)
  int at(int j) const { return n.at(j - 1); }
};

struct HpOptions {
  int degree_cap = 24;
  int max_fixed_point_iterations = 400;
  bool extended_precision = false;  // long double rows/solve in the direct route
};

/// Weight chain of a zero-polynomial vector: values and constants of the
/// descending recursion
///   H_m = (-1)^m,
///   H_j(z) = int Q_{j+1}^2(x)/(z-x) H_{j+1}(x) d sigma_{j+1}(x)/(Q_j Q_{j+2}),
/// whose integrands are sign-definite, so every level is computed at full
/// relative accuracy regardless of |n|.
struct WeightChain {
  std::vector<std::vector<Real>> h_density;  // [j] over Delta_{j+1} nodes, j = 0..m-1
  std::vector<Real> K;                       // K_0..K_m (K_m = 1)
  std::vector<int> eps;                      // eps_1..eps_m
};

/// Solution of the multi-level interpolation problem at a multi-index.
/// Polynomials live in the Chebyshev basis of the hull of all intervals.
class HpSolution {
 public:
  const MultiIndex& index() const { return index_; }
  int m() const { return static_cast<int>(a_.size()) - 1; }
  const Interval& basis_interval() const { return hull_; }
  Real condition_estimate() const { return cond_; }

  const ChebSeries& a(int k) const { return a_.at(k); }  // k = 0..m

  bool has_Q() const { return !Q_.empty(); }
  const ChebSeries& Q(int j) const { return Q_.at(j - 1); }            // j = 1..m
  const std::vector<Real>& Q_roots(int j) const { return roots_.at(j - 1); }

  bool has_constants() const { return !chain_.K.empty(); }
  Real K(int j) const { return chain_.K.at(j); }              // j = 0..m, K_m = 1
  Real kappa(int j) const { return kappa_.at(j - 1); }        // j = 1..m
  int epsilon_sign(int j) const { return chain_.eps.at(j - 1); }  // j = 1..m

  // populated by the solver pipeline (hp_solve / extract_Q /
  // compute_normalization); treat as read-only
  MultiIndex index_;
  Interval hull_;
  Real cond_ = 0.0;
  std::vector<ChebSeries> a_;                  // a_0..a_m
  std::vector<std::vector<Real>> remainder_;   // [j] over Delta_{j+1} nodes (diagnostic)
  std::vector<ChebSeries> fixed_point_Q_;      // iteration output Q_1..Q_m
  WeightChain fixed_point_chain_;              // stable form evaluator data
  std::vector<Real> fixed_point_history_;      // per-iteration distances
  std::vector<ChebSeries> Q_;                  // Q_1..Q_m (after extract_Q)
  std::vector<std::vector<Real>> roots_;
  WeightChain chain_;                          // from the extracted Q's
  std::vector<Real> kappa_;                    // kappa_1..kappa_m
};

/// Solve the interpolation problem: the forms
///   A_j = (-1)^j a_j + sum_{k>j} (-1)^k a_k s^_{j+1,k}
/// vanish at infinity to order n_{j+1}+1 for j = 0..m-1.
///
/// The zero-polynomial vector (Q_{n,1},...,Q_{n,m}) is computed as the unique
/// fixed point of the varying-measure orthogonalization operator (iterated
/// from a Chebyshev-node seed; the Q-denominators keep every Gram solve
/// well-scaled at any admissible |n|). a_m := Q_m and the lower a_j follow by
/// divided-difference back-substitution.
HpSolution hp_solve(const NikishinSystem& system, const MultiIndex& index,
                    const HpOptions& options = {});

/// Direct reduced assembly: the square |n| x |n| moment system in a_m's
/// non-leading coefficients. Conditioning grows like 10^{2|n|} on the demo
/// geometries, so this route is only trustworthy at small |n|; kept as an
/// independent cross-validation of hp_solve.
HpSolution hp_solve_direct(const NikishinSystem& system, const MultiIndex& index,
                           const HpOptions& options = {});

/// Weight chain of an arbitrary admissible zero-polynomial vector.
WeightChain build_weight_chain(const NikishinSystem& system, const std::vector<ChebSeries>& Q);

/// A_j(z), z off Delta_{j+1}. Evaluated as H_j(z) Q_j(z)/Q_{j+1}(z) through
/// the solution's weight chain (cancellation-free); falls back to the
/// remainder representation for solutions without fixed-point data.
Complex form_eval(const HpSolution& sol, const NikishinSystem& system, int j, Complex z);
Complex form_eval_derivative(const HpSolution& sol, const NikishinSystem& system, int j, Complex z);

/// A_j(z) as sum_{k>j} (-1)^k int a_k(x) d s_{j+1,k}(x)/(z-x); exact in
/// exact arithmetic, cancellation-limited beyond small |n|.
Complex form_eval_remainder(const HpSolution& sol, const NikishinSystem& system, int j, Complex z);

/// A_j(z) combined directly from polynomial values and transforms
/// (cross-validation at small |n| only).
Complex form_eval_direct(const HpSolution& sol, const NikishinSystem& system, int j, Complex z);

/// nu-th Laurent moment of A_j (coefficient of z^{-nu-1}) computed from the
/// remainder densities, with an absolute-value scale; meaningful while the
/// scale dominates the cancellation floor (small |n|).
std::pair<Real, Real> form_laurent_moment(const HpSolution& sol, const NikishinSystem& system,
                                          int j, int nu);

/// Observed far-field decay exponent of A_j between |z| = 1e3 and 1e4: the
/// stable order check, ~ n_{j+1} + 1 for an exact solution.
Real form_decay_order(const HpSolution& sol, const NikishinSystem& system, int j);

/// Find the eta_{n,j} simple zeros of A_j inside each open Delta_j and store
/// the monic zero polynomials Q_{n,j} (Q_{n,m} is a_{n,m} itself). Throws
/// zero-count-mismatch when the count is off.
void extract_Q(HpSolution& sol, const NikishinSystem& system);

/// Weights H_{n,j}, constants K_{n,j}, kappa_{n,j}, signs eps_{n,j}
/// (descending recursion from the extracted Q's).
void compute_normalization(HpSolution& sol, const NikishinSystem& system);

/// H_{n,j}(z), z off Delta_{j+1} (H_{n,m} = (-1)^m everywhere).
Complex weight_H(const HpSolution& sol, const NikishinSystem& system, int j, Complex z);

/// max over nu < eta_{n,j+1} of the normalized varying-measure orthogonality
/// integrals of Q_{n,j+1} (j = 0..m-1).
Real orthogonality_residual(const HpSolution& sol, const NikishinSystem& system, int j);

/// One application of the polynomial fixed-point operator: given monic
/// Q_1..Q_m (degrees eta_{n,j}, zeros off the neighbor intervals), produce
/// the orthogonalized vector Q*_1..Q*_m (hull Chebyshev basis, descending
/// weight recursion).
std::vector<ChebSeries> apply_Tn(const NikishinSystem& system, const MultiIndex& index,
                                 const std::vector<ChebSeries>& Qvec);

/// Relative coefficient-wise distance between two monic vectors.
Real poly_vector_distance(const std::vector<ChebSeries>& A, const std::vector<ChebSeries>& B);

/// Reference solve of the full (m+1)-block Laurent system in the power
/// basis (small |n| only; cross-validation of the reduced assembly).
std::vector<std::vector<Real>> hp_solve_full_block(const NikishinSystem& system,
                                                   const MultiIndex& index);

}  // namespace mlhp
