#include "mlhp/hermite_pade.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace mlhp {

MultiIndex MultiIndex::create(std::vector<int> n) {
  if (n.empty()) fail(errc::invalid_argument, "empty multi-index");
  int total = 0;
  for (int v : n) {
    if (v < 0) fail(errc::invalid_argument, "multi-index entries must be nonnegative");
    total += v;
  }
  if (total == 0) fail(errc::invalid_argument, "multi-index must not be all zero");
  MultiIndex idx;
  idx.n = std::move(n);
  return idx;
}

int MultiIndex::total() const {
  int t = 0;
  for (int v : n) t += v;
  return t;
}

int MultiIndex::eta(int j) const {
  int t = 0;
  for (int i = 0; i < std::min<int>(j, n.size()); ++i) t += n[i];
  return t;
}

namespace {

Interval hull_of(const NikishinSystem& system) {
  Real a = system.interval(1).a, b = system.interval(1).b;
  for (int j = 2; j <= system.size(); ++j) {
    a = std::min(a, system.interval(j).a);
    b = std::max(b, system.interval(j).b);
  }
  return Interval(a, b);
}

/// Monic leading Chebyshev coefficient of degree-d polynomials on iv.
Real monic_leading_coeff(const Interval& iv, int d) {
  if (d == 0) return 1.0;
  return std::pow(iv.half(), d) * std::pow(2.0, 1 - d);
}

/// Divided-difference integral: int (p(z) - p(x))/(z - x) d s_{j+1,k}(x),
/// a polynomial of degree deg p - 1 on the same basis.
ChebSeries dd_integral(const NikishinSystem& system, int j1, int k, const ChebSeries& p) {
  const QuadratureRule& rule = system.sigma_rule(j1);
  const std::vector<Real>& dens = system.inner_density_on_nodes(j1, k);
  ChebSeries acc = ChebSeries::constant(p.domain(), 0.0);
  for (int t = 0; t < rule.size(); ++t) {
    ChebSeries q = p.deflate_at(rule.nodes[t]);
    q *= rule.weights[t] * dens[t];
    acc += q;
  }
  return acc;
}

/// Back-substitution: given a_m, produce a_j for j = m-1..0 via
/// a_j = sum_{k>j} (-1)^{k-j+1} DD_{j+1,k}(a_k).
std::vector<ChebSeries> back_substitute(const NikishinSystem& system, ChebSeries a_m) {
  int m = system.size();
  std::vector<ChebSeries> a(m + 1, ChebSeries::constant(a_m.domain(), 0.0));
  a[m] = std::move(a_m);
  for (int j = m - 1; j >= 0; --j) {
    ChebSeries acc = ChebSeries::constant(a[m].domain(), 0.0);
    for (int k = j + 1; k <= m; ++k) {
      ChebSeries term = dd_integral(system, j + 1, k, a[k]);
      term *= ((k - j + 1) % 2 == 0) ? 1.0 : -1.0;
      acc += term;
    }
    a[j] = std::move(acc);
  }
  return a;
}

std::vector<std::vector<Real>> remainder_densities(const NikishinSystem& system,
                                                   const std::vector<ChebSeries>& a) {
  int m = system.size();
  std::vector<std::vector<Real>> out(m);
  for (int j = 0; j < m; ++j) {
    const QuadratureRule& rule = system.sigma_rule(j + 1);
    std::vector<Real> g(rule.size(), 0.0);
    for (int k = j + 1; k <= m; ++k) {
      const std::vector<Real>& dens = system.inner_density_on_nodes(j + 1, k);
      Real sign = (k % 2 == 0) ? 1.0 : -1.0;
      for (int t = 0; t < rule.size(); ++t)
        g[t] += sign * rule.weights[t] * dens[t] * a[k](rule.nodes[t]);
    }
    out[j] = std::move(g);
  }
  return out;
}

Real chain_orthogonality_residual(const NikishinSystem& system, const std::vector<ChebSeries>& Q,
                                  const WeightChain& chain, const MultiIndex& index, int j) {
  const QuadratureRule& rule = system.sigma_rule(j + 1);
  int eta = index.eta(j + 1);
  Real worst = 0.0;
  for (int nu = 0; nu < eta; ++nu) {
    Real val = 0.0, scale = 0.0;
    for (int t = 0; t < rule.size(); ++t) {
      Real x = rule.nodes[t];
      Real q1 = Q[j](x);  // Q_{j+1}
      // h_density = w Q_{j+1}^2 H_{j+1} / (Q_j Q_{j+2}); divide one Q_{j+1}
      Real base = (q1 != 0.0) ? chain.h_density[j][t] / q1 : 0.0;
      Real p = std::pow(x, nu);
      val += base * p;
      scale += std::abs(base * p);
    }
    if (scale > 0.0) worst = std::max(worst, std::abs(val) / scale);
  }
  return worst;
}

template <typename S>
HpSolution hp_solve_impl(const NikishinSystem& system, const MultiIndex& index,
                         const HpOptions& options) {
  int m = system.size();
  if (index.components() != m) fail(errc::index_out_of_range, "multi-index length != m");
  int N = index.total();
  if (N > options.degree_cap)
    fail(errc::degree_cap_exceeded, "|n| exceeds the configured degree cap");

  Interval hull = hull_of(system);

  // responses a_j^{(i)} of every basis element T_i of a_m
  std::vector<std::vector<ChebSeries>> resp(N + 1);
  for (int i = 0; i <= N; ++i)
    resp[i] = back_substitute(system, ChebSeries::basis(hull, i));

  // moment rows: for j = 0..m-1, nu < n_{j+1}:
  //   sum_{k>j} (-1)^k int T_nu(x; Delta_{j+1}) a_k(x) d s_{j+1,k}(x) = 0
  Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> M(N, N);
  Eigen::Matrix<S, Eigen::Dynamic, 1> rhs(N);
  Real cN = monic_leading_coeff(hull, N);

  int row = 0;
  for (int j = 0; j < m; ++j) {
    int count = index.at(j + 1);
    if (count == 0) continue;
    const QuadratureRule& rule = system.sigma_rule(j + 1);
    const Interval& iv = system.interval(j + 1);
    int nq = rule.size();
    std::vector<std::vector<S>> g(N + 1, std::vector<S>(nq, S(0)));
    for (int k = j + 1; k <= m; ++k) {
      const std::vector<Real>& dens = system.inner_density_on_nodes(j + 1, k);
      Real sign = (k % 2 == 0) ? 1.0 : -1.0;
      for (int i = 0; i <= N; ++i) {
        const ChebSeries& p = resp[i][k];
        for (int t = 0; t < nq; ++t)
          g[i][t] += S(sign * rule.weights[t] * dens[t] * p(rule.nodes[t]));
      }
    }
    std::vector<std::vector<S>> tau(count, std::vector<S>(nq));
    for (int t = 0; t < nq; ++t) {
      Real xi = iv.to_xi(rule.nodes[t]);
      S tprev = S(1), tcur = S(xi);
      for (int nu = 0; nu < count; ++nu) {
        S val = (nu == 0) ? tprev : ((nu == 1) ? tcur : S(0));
        if (nu >= 2) {
          val = S(2) * S(xi) * tcur - tprev;
          tprev = tcur;
          tcur = val;
        }
        tau[nu][t] = val;
      }
    }
    for (int nu = 0; nu < count; ++nu, ++row) {
      for (int i = 0; i < N; ++i) {
        S acc = S(0);
        for (int t = 0; t < nq; ++t) acc += tau[nu][t] * g[i][t];
        M(row, i) = acc;
      }
      S acc = S(0);
      for (int t = 0; t < nq; ++t) acc += tau[nu][t] * g[N][t];
      rhs(row) = -S(cN) * acc;
    }
  }

  Eigen::PartialPivLU<Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>> lu(M);
  Real rcond = static_cast<Real>(lu.rcond());
  if (!(rcond > 1e-15))
    fail(errc::singular_system,
         "moment system numerically rank-deficient (rcond ~ " + std::to_string(rcond) + ")");
  Eigen::Matrix<S, Eigen::Dynamic, 1> c = lu.solve(rhs);

  std::vector<Real> coeffs(N + 1);
  for (int i = 0; i < N; ++i) coeffs[i] = static_cast<Real>(c(i));
  coeffs[N] = cN;

  HpSolution sol;
  sol.index_ = index;
  sol.hull_ = hull;
  sol.cond_ = 1.0 / rcond;
  sol.a_ = back_substitute(system, ChebSeries(hull, coeffs));
  sol.remainder_ = remainder_densities(system, sol.a_);
  return sol;
}

}  // namespace

WeightChain build_weight_chain(const NikishinSystem& system, const std::vector<ChebSeries>& Q) {
  int m = system.size();
  if (static_cast<int>(Q.size()) != m) fail(errc::size_mismatch, "need one Q per generator");
  auto Qval = [&](int j, Real x) -> Real {
    if (j < 1 || j > m) return 1.0;
    return Q[j - 1](x);
  };

  WeightChain chain;
  chain.h_density.assign(m, {});
  chain.K.assign(m + 1, 1.0);
  chain.eps.assign(m, 0);

  std::vector<Real> Hnode(system.sigma_rule(m).size(), (m % 2 == 0) ? 1.0 : -1.0);
  for (int j = m - 1; j >= 0; --j) {
    const QuadratureRule& rule = system.sigma_rule(j + 1);
    int nq = rule.size();
    std::vector<Real> dens(nq);
    int sign_center = 0;
    Real ksum = 0.0;
    for (int t = 0; t < nq; ++t) {
      Real x = rule.nodes[t];
      Real varying = Hnode[t] / (Qval(j, x) * Qval(j + 2, x));
      int s = varying > 0.0 ? 1 : (varying < 0.0 ? -1 : 0);
      if (t == nq / 2) sign_center = s;
      if (s != 0 && sign_center != 0 && s != sign_center && t != nq / 2)
        fail(errc::sign_not_constant, "varying density changes sign on Delta_" +
                                          std::to_string(j + 1) + " (precision failure)");
      Real q1 = Q[j](x);  // Q_{j+1}
      dens[t] = rule.weights[t] * q1 * q1 * varying;
      ksum += std::abs(dens[t]);
    }
    // the center sample decides; re-scan now that it is fixed
    for (int t = 0; t < nq; ++t) {
      Real x = rule.nodes[t];
      Real varying = Hnode[t] / (Qval(j, x) * Qval(j + 2, x));
      int s = varying > 0.0 ? 1 : (varying < 0.0 ? -1 : 0);
      if (s != sign_center)
        fail(errc::sign_not_constant, "varying density changes sign on Delta_" +
                                          std::to_string(j + 1) + " (precision failure)");
    }
    chain.eps[j] = sign_center;  // eps_{n,j+1}
    chain.K[j] = 1.0 / std::sqrt(ksum);
    chain.h_density[j] = dens;
    if (j >= 1) {
      const QuadratureRule& up = system.sigma_rule(j);
      std::vector<Real> next(up.size());
      for (int s = 0; s < up.size(); ++s) {
        Real acc = 0.0;
        for (int t = 0; t < nq; ++t) acc += dens[t] / (up.nodes[s] - rule.nodes[t]);
        next[s] = acc;
      }
      Hnode = std::move(next);
    }
  }
  return chain;
}

HpSolution hp_solve_direct(const NikishinSystem& system, const MultiIndex& index,
                           const HpOptions& options) {
  if (options.extended_precision) return hp_solve_impl<long double>(system, index, options);
  return hp_solve_impl<double>(system, index, options);
}

HpSolution hp_solve(const NikishinSystem& system, const MultiIndex& index,
                    const HpOptions& options) {
  int m = system.size();
  if (index.components() != m) fail(errc::index_out_of_range, "multi-index length != m");
  int N = index.total();
  if (N > options.degree_cap)
    fail(errc::degree_cap_exceeded, "|n| exceeds the configured degree cap");
  Interval hull = hull_of(system);

  // seed: monic polynomials with Chebyshev-node roots inside each interval,
  // kept in their native per-interval bases throughout the iteration
  std::vector<ChebSeries> Q;
  Q.reserve(m);
  for (int j = 1; j <= m; ++j) {
    int eta = index.eta(j);
    if (eta == 0) {
      Q.push_back(ChebSeries::constant(system.interval(j), 1.0));
      continue;
    }
    auto roots = cheb_points_first_kind(system.interval(j), eta);
    Q.push_back(monic_from_roots(system.interval(j), roots));
  }

  // iterate the polynomial fixed-point operator; its unique fixed point is
  // the zero-polynomial vector of the solution. The iterate distance
  // drops geometrically until it hits the Gram-solve noise floor, so stop at
  // 1e-13 or when the decrease stops below 1e-7.
  bool converged = false;
  std::vector<Real> history;
  for (int it = 0; it < options.max_fixed_point_iterations; ++it) {
    std::vector<ChebSeries> next = apply_Tn(system, index, Q);
    Real dist = poly_vector_distance(next, Q);
    Q = std::move(next);
    history.push_back(dist);
    size_t k = history.size();
    if (dist < 1e-13 || (dist < 1e-7 && k >= 3 && dist > 0.3 * history[k - 3])) {
      converged = true;
      break;
    }
    if (k > 30 && history[k - 1] > 0.5 * history[k - 16])
      fail(errc::no_convergence, "fixed-point iteration stalled away from the solution");
  }
  if (!converged) fail(errc::no_convergence, "fixed-point iteration did not converge");

  HpSolution sol;
  sol.index_ = index;
  sol.hull_ = hull;
  // a_m on the hull basis: the divided-difference chain deflates at nodes of
  // every interval, which is backward-stable only inside the basis domain
  {
    auto pts = cheb_points_second_kind(hull, std::max(2, N + 1));
    std::vector<Real> vals(pts.size());
    for (size_t i = 0; i < pts.size(); ++i) vals[i] = Q[m - 1](pts[i]);
    sol.a_ = back_substitute(system, cheb_interpolate(hull, vals));
  }
  sol.remainder_ = remainder_densities(system, sol.a_);
  sol.fixed_point_chain_ = build_weight_chain(system, Q);
  sol.fixed_point_Q_ = std::move(Q);
  sol.fixed_point_history_ = std::move(history);

  // self-validation: the varying-measure orthogonality the fixed point must
  // satisfy, checked against the sign-definite chain (stable at any |n|)
  for (int j = 0; j < m; ++j) {
    Real r = chain_orthogonality_residual(system, sol.fixed_point_Q_, sol.fixed_point_chain_,
                                          index, j);
    if (r > 1e-7)
      fail(errc::no_convergence,
           "fixed point violates varying-measure orthogonality at level " + std::to_string(j));
  }
  return sol;
}

Complex form_eval(const HpSolution& sol, const NikishinSystem& system, int j, Complex z) {
  int m = sol.m();
  if (j < 0 || j > m) fail(errc::index_out_of_range, "form index");
  if (j == m) {
    Complex v = sol.fixed_point_Q_.empty() ? sol.a_[m](z) : sol.fixed_point_Q_[m - 1](z);
    return (m % 2 == 0) ? v : -v;
  }
  if (sol.fixed_point_Q_.empty()) return form_eval_remainder(sol, system, j, z);
  const QuadratureRule& rule = system.sigma_rule(j + 1);
  if (z.imag() == 0.0 && rule.interval.contains(z.real()))
    fail(errc::on_support, "form evaluated on Delta_{j+1}");
  Complex H = 0.0;
  for (int t = 0; t < rule.size(); ++t)
    H += sol.fixed_point_chain_.h_density[j][t] / (z - rule.nodes[t]);
  Complex Qj = (j >= 1) ? sol.fixed_point_Q_[j - 1](z) : Complex(1.0, 0.0);
  Complex Qj1 = sol.fixed_point_Q_[j](z);
  return H * Qj / Qj1;
}

Complex form_eval_derivative(const HpSolution& sol, const NikishinSystem& system, int j,
                             Complex z) {
  int m = sol.m();
  if (j < 0 || j > m) fail(errc::index_out_of_range, "form index");
  if (j == m) {
    Complex v = sol.a_[m].derivative()(z);
    return (m % 2 == 0) ? v : -v;
  }
  const QuadratureRule& rule = system.sigma_rule(j + 1);
  if (z.imag() == 0.0 && rule.interval.contains(z.real()))
    fail(errc::on_support, "form evaluated on Delta_{j+1}");
  if (sol.fixed_point_Q_.empty()) {
    Complex acc = 0.0;
    for (int t = 0; t < rule.size(); ++t) {
      Complex dz = z - rule.nodes[t];
      acc -= sol.remainder_[j][t] / (dz * dz);
    }
    return acc;
  }
  Complex H = 0.0, dH = 0.0;
  for (int t = 0; t < rule.size(); ++t) {
    Complex dz = z - rule.nodes[t];
    Real w = sol.fixed_point_chain_.h_density[j][t];
    H += w / dz;
    dH -= w / (dz * dz);
  }
  Complex Qj = (j >= 1) ? sol.fixed_point_Q_[j - 1](z) : Complex(1.0, 0.0);
  Complex dQj = (j >= 1) ? sol.fixed_point_Q_[j - 1].derivative()(z) : Complex(0.0, 0.0);
  Complex Qj1 = sol.fixed_point_Q_[j](z);
  Complex dQj1 = sol.fixed_point_Q_[j].derivative()(z);
  return (dH * Qj + H * dQj) / Qj1 - H * Qj * dQj1 / (Qj1 * Qj1);
}

Complex form_eval_remainder(const HpSolution& sol, const NikishinSystem& system, int j,
                            Complex z) {
  int m = sol.m();
  if (j < 0 || j > m) fail(errc::index_out_of_range, "form index");
  if (j == m) {
    Complex v = sol.a_[m](z);
    return (m % 2 == 0) ? v : -v;
  }
  const QuadratureRule& rule = system.sigma_rule(j + 1);
  if (z.imag() == 0.0 && rule.interval.contains(z.real()))
    fail(errc::on_support, "form evaluated on Delta_{j+1}");
  Complex acc = 0.0;
  for (int t = 0; t < rule.size(); ++t) acc += sol.remainder_[j][t] / (z - rule.nodes[t]);
  return acc;
}

Complex form_eval_direct(const HpSolution& sol, const NikishinSystem& system, int j, Complex z) {
  int m = sol.m();
  if (j < 0 || j > m) fail(errc::index_out_of_range, "form index");
  Complex acc = sol.a_[j](z);
  if (j % 2 != 0) acc = -acc;
  for (int k = j + 1; k <= m; ++k) {
    Complex term = sol.a_[k](z) * system.shat(j + 1, k, z);
    acc += (k % 2 == 0) ? term : -term;
  }
  return acc;
}

std::pair<Real, Real> form_laurent_moment(const HpSolution& sol, const NikishinSystem& system,
                                          int j, int nu) {
  int m = sol.m();
  if (j < 0 || j >= m) fail(errc::index_out_of_range, "Laurent moments exist for j = 0..m-1");
  const QuadratureRule& rule = system.sigma_rule(j + 1);
  Real val = 0.0, scale = 0.0;
  for (int t = 0; t < rule.size(); ++t) {
    Real p = std::pow(rule.nodes[t], nu);
    val += sol.remainder_[j][t] * p;
    scale += std::abs(sol.remainder_[j][t] * p);
  }
  return {val, scale};
}

Real form_decay_order(const HpSolution& sol, const NikishinSystem& system, int j) {
  Real v3 = std::abs(form_eval(sol, system, j, Complex(1e3, 0.0)));
  Real v4 = std::abs(form_eval(sol, system, j, Complex(1e4, 0.0)));
  if (v3 == 0.0 || v4 == 0.0) fail(errc::invalid_argument, "form vanished in the far field");
  return std::log10(v3 / v4);
}

void extract_Q(HpSolution& sol, const NikishinSystem& system) {
  int m = sol.m();
  sol.Q_.clear();
  sol.roots_.clear();
  for (int j = 1; j <= m; ++j) {
    int eta = sol.index_.eta(j);
    const Interval& iv = system.interval(j);
    std::vector<Real> roots;
    if (eta > 0) {
      int grid = std::max(48, 4 * eta + 16);
      auto pts = cheb_points_first_kind(iv, grid);
      std::vector<Real> samples(grid);
      for (int i = 0; i < grid; ++i)
        samples[i] = form_eval(sol, system, j, Complex(pts[i], 0.0)).real();
      ChebSeries interp = cheb_fit_first_kind(iv, samples).truncated(1e-13);
      auto fn = [&](Real x) { return form_eval(sol, system, j, Complex(x, 0.0)).real(); };
      auto dfn = [&](Real x) {
        return form_eval_derivative(sol, system, j, Complex(x, 0.0)).real();
      };
      roots = cheb_roots_in_interval(interp, fn, dfn);
      if (static_cast<int>(roots.size()) != eta)
        fail(errc::zero_count_mismatch,
             "form " + std::to_string(j) + " produced " + std::to_string(roots.size()) +
                 " interior zeros, expected " + std::to_string(eta));
      if (j == m) {
        // cross-check against direct rootfinding on the polynomial a_m
        const ChebSeries& am =
            sol.fixed_point_Q_.empty() ? sol.a_[m] : sol.fixed_point_Q_[m - 1];
        auto found = cheb_roots_in_interval(am);
        std::vector<Real> direct;
        for (Real r : found)
          if (iv.strictly_contains(r)) direct.push_back(r);
        if (direct.size() != roots.size())
          fail(errc::zero_count_mismatch, "direct a_m rootfinding disagrees on the count");
        for (size_t i = 0; i < roots.size(); ++i)
          if (std::abs(direct[i] - roots[i]) > 1e-8 * (1.0 + std::abs(roots[i])))
            fail(errc::zero_count_mismatch, "direct a_m roots disagree beyond 1e-8");
      }
    }
    sol.roots_.push_back(roots);
    // Q_{n,m} is a_{n,m} itself; lower ones are rebuilt from their roots.
    // Native per-interval bases keep leading coefficients fully accurate.
    if (j == m) {
      if (!sol.fixed_point_Q_.empty())
        sol.Q_.push_back(sol.fixed_point_Q_[m - 1]);
      else
        sol.Q_.push_back(sol.a_[m]);
    } else {
      sol.Q_.push_back(monic_from_roots(iv, roots));
    }
  }
}

void compute_normalization(HpSolution& sol, const NikishinSystem& system) {
  if (!sol.has_Q()) fail(errc::invalid_argument, "extract_Q must run before normalization");
  sol.chain_ = build_weight_chain(system, sol.Q_);
  int m = sol.m();
  sol.kappa_.assign(m, 0.0);
  for (int j = 0; j < m; ++j) sol.kappa_[j] = sol.chain_.K[j] / sol.chain_.K[j + 1];
}

Complex weight_H(const HpSolution& sol, const NikishinSystem& system, int j, Complex z) {
  int m = sol.m();
  if (j < 0 || j > m) fail(errc::index_out_of_range, "weight index");
  if (j == m) return Complex((m % 2 == 0) ? 1.0 : -1.0, 0.0);
  if (!sol.has_constants()) fail(errc::invalid_argument, "compute_normalization must run first");
  const QuadratureRule& rule = system.sigma_rule(j + 1);
  if (z.imag() == 0.0 && rule.interval.contains(z.real()))
    fail(errc::on_support, "H_j evaluated on Delta_{j+1}");
  Complex acc = 0.0;
  for (int t = 0; t < rule.size(); ++t) acc += sol.chain_.h_density[j][t] / (z - rule.nodes[t]);
  return acc;
}

Real orthogonality_residual(const HpSolution& sol, const NikishinSystem& system, int j) {
  int m = sol.m();
  if (j < 0 || j >= m) fail(errc::index_out_of_range, "orthogonality index");
  if (!sol.has_constants()) fail(errc::invalid_argument, "compute_normalization must run first");
  return chain_orthogonality_residual(system, sol.Q_, sol.chain_, sol.index_, j);
}

std::vector<ChebSeries> apply_Tn(const NikishinSystem& system, const MultiIndex& index,
                                 const std::vector<ChebSeries>& Qvec) {
  int m = system.size();
  if (static_cast<int>(Qvec.size()) != m)
    fail(errc::invalid_argument, "need one polynomial per generator");
  for (int j = 1; j <= m; ++j) {
    const ChebSeries& q = Qvec[j - 1];
    int eta = index.eta(j);
    if (q.degree() != eta)
      fail(errc::invalid_argument, "Q_" + std::to_string(j) + " must have degree eta_j");
    Real lead = q.coeffs().back() / monic_leading_coeff(q.domain(), eta);
    if (std::abs(lead - 1.0) > 1e-6)
      fail(errc::invalid_argument, "input polynomials must be monic");
    for (int nb : {j - 1, j + 1}) {
      if (nb < 1 || nb > m) continue;
      for (Real x : cheb_points_first_kind(system.interval(nb), 64))
        if (std::abs(q(x)) == 0.0)
          fail(errc::invalid_argument, "input polynomial vanishes on a neighbor interval");
    }
  }

  auto Qin = [&](int j, Real x) -> Real {
    if (j < 1 || j > m) return 1.0;
    return Qvec[j - 1](x);
  };

  // outputs stay in the Chebyshev basis of their own interval: re-expansion
  // onto a wider basis loses relative accuracy in the leading coefficients
  std::vector<ChebSeries> out;
  out.reserve(m);
  for (int j = 1; j <= m; ++j)
    out.push_back(ChebSeries::constant(system.interval(j), 1.0));

  // H(Q;.) values at the sigma_j nodes, descending from H_m = (-1)^m
  std::vector<Real> Hcur(system.sigma_rule(m).size(), (m % 2 == 0) ? 1.0 : -1.0);
  for (int j = m; j >= 1; --j) {
    const QuadratureRule& rule = system.sigma_rule(j);
    const Interval& iv = system.interval(j);
    int nq = rule.size();
    int eta = index.eta(j);
    std::vector<Real> varying(nq);
    for (int t = 0; t < nq; ++t)
      varying[t] =
          rule.weights[t] * Hcur[t] / (Qin(j - 1, rule.nodes[t]) * Qin(j + 1, rule.nodes[t]));

    ChebSeries qstar = ChebSeries::constant(iv, 1.0);
    if (eta > 0) {
      // moment system in the Chebyshev basis of Delta_j, monic of degree eta
      Eigen::MatrixXd G(eta, eta);
      Eigen::VectorXd rhs(eta);
      Real clead = monic_leading_coeff(iv, eta);
      std::vector<std::vector<Real>> tval(eta + 1, std::vector<Real>(nq));
      for (int t = 0; t < nq; ++t) {
        Real xi = iv.to_xi(rule.nodes[t]);
        Real tp = 1.0, tc = xi;
        for (int d = 0; d <= eta; ++d) {
          Real v;
          if (d == 0)
            v = 1.0;
          else if (d == 1)
            v = xi;
          else {
            v = 2.0 * xi * tc - tp;
            tp = tc;
            tc = v;
          }
          tval[d][t] = v;
        }
      }
      for (int nu = 0; nu < eta; ++nu) {
        for (int i = 0; i < eta; ++i) {
          Real acc = 0.0;
          for (int t = 0; t < nq; ++t) acc += tval[nu][t] * tval[i][t] * varying[t];
          G(nu, i) = acc;
        }
        Real acc = 0.0;
        for (int t = 0; t < nq; ++t) acc += tval[nu][t] * tval[eta][t] * varying[t];
        rhs(nu) = -clead * acc;
      }
      Eigen::PartialPivLU<Eigen::MatrixXd> lu(G);
      if (!(lu.rcond() > 1e-15))
        fail(errc::gram_singular, "orthogonalization Gram system singular");
      Eigen::VectorXd c = lu.solve(rhs);
      std::vector<Real> coeffs(eta + 1);
      for (int i = 0; i < eta; ++i) coeffs[i] = c(i);
      coeffs[eta] = clead;
      qstar = ChebSeries(iv, std::move(coeffs));
    }
    out[j - 1] = qstar;
    // weight for the next level down: H_{j-1}(Q;z) at the sigma_{j-1} nodes
    if (j >= 2) {
      const QuadratureRule& up = system.sigma_rule(j - 1);
      std::vector<Real> next(up.size());
      for (int s = 0; s < up.size(); ++s) {
        Real acc = 0.0;
        for (int t = 0; t < nq; ++t) {
          Real qs = qstar(rule.nodes[t]);
          acc += qs * qs * varying[t] / (up.nodes[s] - rule.nodes[t]);
        }
        next[s] = acc;
      }
      Hcur = std::move(next);
    }
  }
  return out;
}

Real poly_vector_distance(const std::vector<ChebSeries>& A, const std::vector<ChebSeries>& B) {
  if (A.size() != B.size()) fail(errc::size_mismatch, "vector lengths differ");
  Real worst = 0.0;
  for (size_t j = 0; j < A.size(); ++j) {
    ChebSeries b = B[j];
    if (b.domain().a != A[j].domain().a || b.domain().b != A[j].domain().b) {
      // re-expand B's component on A's basis
      int npts = std::max(2, std::max(A[j].degree(), b.degree()) + 1);
      auto pts = cheb_points_second_kind(A[j].domain(), npts);
      std::vector<Real> vals(pts.size());
      for (size_t i = 0; i < pts.size(); ++i) vals[i] = B[j](pts[i]);
      b = cheb_interpolate(A[j].domain(), vals);
    }
    size_t len = std::max(A[j].coeffs().size(), b.coeffs().size());
    Real scale = std::max(A[j].max_abs_coeff(), b.max_abs_coeff());
    if (scale == 0.0) continue;
    for (size_t i = 0; i < len; ++i) {
      Real ca = i < A[j].coeffs().size() ? A[j].coeffs()[i] : 0.0;
      Real cb = i < b.coeffs().size() ? b.coeffs()[i] : 0.0;
      worst = std::max(worst, std::abs(ca - cb) / scale);
    }
  }
  return worst;
}

std::vector<std::vector<Real>> hp_solve_full_block(const NikishinSystem& system,
                                                   const MultiIndex& index) {
  // Laurent-coefficient assembly in the power basis: unknowns are the
  // coefficients of a_0..a_{m-1} (degree <= N-1) and a_m (monic, degree N).
  int m = system.size();
  int N = index.total();
  if (N > 8) fail(errc::degree_cap_exceeded, "full-block reference limited to small |n|");
  int unknowns = m * N + N;

  auto moments = [&](int j1, int k) { return system.nested_moments(j1, k, 2 * N + 1); };

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(unknowns, unknowns);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(unknowns);
  auto col_of = [&](int k, int i) { return k * N + i; };

  int row = 0;
  for (int j = 0; j < m; ++j) {
    // coefficients of z^p for p = N-1 .. -n_{j+1} must vanish
    for (int p = N - 1; p >= -index.at(j + 1); --p, ++row) {
      if (p >= 0 && p <= N - 1) {
        Real s = (j % 2 == 0) ? 1.0 : -1.0;
        A(row, col_of(j, p)) += s;
      }
      for (int k = j + 1; k <= m; ++k) {
        auto mom = moments(j + 1, k);
        Real s = (k % 2 == 0) ? 1.0 : -1.0;
        int top = (k == m) ? N : N - 1;
        for (int i = std::max(p + 1, 0); i <= top; ++i) {
          Real entry = s * mom[i - p - 1];
          if (k == m && i == N)
            b(row) -= entry;  // monic: coefficient is 1
          else
            A(row, col_of(k, i)) += entry;
        }
      }
    }
  }
  if (row != unknowns) fail(errc::invalid_argument, "full-block row count mismatch");
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  if (!(lu.rcond() > 1e-15)) fail(errc::singular_system, "full-block system singular");
  Eigen::VectorXd x = lu.solve(b);

  std::vector<std::vector<Real>> out(m + 1);
  for (int k = 0; k < m; ++k) {
    out[k].assign(N, 0.0);
    for (int i = 0; i < N; ++i) out[k][i] = x(col_of(k, i));
  }
  out[m].assign(N + 1, 0.0);
  for (int i = 0; i < N; ++i) out[m][i] = x(col_of(m, i));
  out[m][N] = 1.0;
  return out;
}

}  // namespace mlhp
