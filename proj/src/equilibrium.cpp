#include "mlhp/equilibrium.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace mlhp {

RaySpec RaySpec::create(std::vector<Real> p) {
  if (p.empty()) fail(errc::invalid_ray, "empty ray");
  if (!(p[0] > 0.0)) fail(errc::invalid_ray, "p_1 must be positive");
  Real sum = 0.0;
  for (size_t j = 0; j < p.size(); ++j) {
    if (p[j] < 0.0) fail(errc::invalid_ray, "ray entries must be nonnegative");
    if (j > 0 && p[j] > p[j - 1] + 1e-14) fail(errc::invalid_ray, "ray not nonincreasing");
    sum += p[j];
  }
  if (std::abs(sum - 1.0) > 1e-12) fail(errc::invalid_ray, "ray must sum to 1");
  RaySpec r;
  r.p = std::move(p);
  r.P.resize(r.p.size());
  Real acc = 0.0;
  for (size_t j = 0; j < r.p.size(); ++j) {
    acc += r.p[j];
    r.P[j] = acc;
  }
  r.P.back() = 1.0;
  return r;
}

std::vector<std::vector<Real>> interaction_matrix(const RaySpec& ray) {
  int m = ray.size();
  std::vector<std::vector<Real>> C(m, std::vector<Real>(m, 0.0));
  for (int j = 1; j <= m; ++j) {
    C[j - 1][j - 1] = ray.P_at(j) * ray.P_at(j);
    if (j < m) {
      C[j - 1][j] = -0.5 * ray.P_at(j) * ray.P_at(j + 1);
      C[j][j - 1] = C[j - 1][j];
    }
  }
  return C;
}

Real interaction_matrix_min_eigenvalue(const RaySpec& ray) {
  auto C = interaction_matrix(ray);
  int m = ray.size();
  Eigen::MatrixXd M(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) M(i, j) = C[i][j];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  return es.eigenvalues().minCoeff();
}

GridDensity balayage_onto(const DiscreteMeasure& source, const Interval& target, int grid_n) {
  GridDensity out;
  out.interval = target;
  auto pts = cheb_points_first_kind(target, grid_n);
  auto factor = balayage_factor(source, target, pts);
  out.values.resize(grid_n);
  for (int i = 0; i < grid_n; ++i) {
    Real x = pts[i];
    out.values[i] = factor[i] / (kPi * std::sqrt((target.b - x) * (x - target.a)));
  }
  return out;
}

std::vector<Real> balayage_factor(const DiscreteMeasure& source, const Interval& target,
                                  std::span<const Real> eval_points) {
  if (source.points.size() != source.masses.size())
    fail(errc::size_mismatch, "discrete measure points/masses mismatch");
  for (Real t : source.points)
    if (target.contains(t))
      fail(errc::overlapping_supports, "balayage source meets the target interval");
  std::vector<Real> out(eval_points.size(), 0.0);
  std::vector<Real> root(source.points.size());
  for (size_t i = 0; i < source.points.size(); ++i) {
    Real t = source.points[i];
    root[i] = std::sqrt(std::abs((t - target.a) * (t - target.b)));
  }
  for (size_t k = 0; k < eval_points.size(); ++k) {
    Real x = eval_points[k];
    Real acc = 0.0;
    for (size_t i = 0; i < source.points.size(); ++i)
      acc += source.masses[i] * root[i] / std::abs(source.points[i] - x);
    out[k] = acc;
  }
  return out;
}

namespace {

/// Gauss-Chebyshev masses of the measure u(x)/(pi sqrt(..)) dx at first-kind nodes.
DiscreteMeasure measure_from_factor(const std::vector<Real>& pts, const std::vector<Real>& u) {
  DiscreteMeasure nu;
  nu.points = pts;
  nu.masses.resize(u.size());
  Real w = 1.0 / Real(u.size());
  for (size_t i = 0; i < u.size(); ++i) nu.masses[i] = w * u[i];
  return nu;
}

}  // namespace

EquilibriumSolution::EquilibriumSolution(std::vector<Interval> intervals, RaySpec ray,
                                         std::vector<std::vector<Real>> u_values, int grid_n)
    : intervals_(std::move(intervals)),
      ray_(std::move(ray)),
      grid_n_(grid_n),
      u_vals_(std::move(u_values)) {
  finalize();
}

void EquilibriumSolution::finalize() {
  int m = size();
  u_series_.clear();
  for (int j = 1; j <= m; ++j)
    u_series_.push_back(cheb_fit_first_kind(intervals_[j - 1], u_vals_[j - 1]));
  omega_.assign(m, 0.0);
  omega_spread_.assign(m, 0.0);
  for (int j = 1; j <= m; ++j) {
    const Interval& iv = intervals_[j - 1];
    auto eq_value = [&](Real x) {
      Real lhs = potential(j, Complex(x, 0.0));
      if (j > 1)
        lhs -= 0.5 * (ray_.P_at(j - 1) / ray_.P_at(j)) * potential(j - 1, Complex(x, 0.0));
      if (j < m)
        lhs -= 0.5 * (ray_.P_at(j + 1) / ray_.P_at(j)) * potential(j + 1, Complex(x, 0.0));
      return lhs;
    };
    Real w_mid = eq_value(iv.mid());
    Real w_q1 = eq_value(iv.a + 0.25 * iv.width());
    Real w_q3 = eq_value(iv.a + 0.75 * iv.width());
    omega_[j - 1] = w_mid;
    omega_spread_[j - 1] = std::max(std::abs(w_q1 - w_mid), std::abs(w_q3 - w_mid));
  }
}

Real EquilibriumSolution::mass(int j) const { return density_factor(j).coeffs()[0]; }

Real EquilibriumSolution::potential(int j, Complex z) const {
  const Interval& iv = interval(j);
  const auto& c = density_factor(j).coeffs();
  Real x = z.real(), y = z.imag();
  if (y == 0.0 && iv.contains(x)) {
    // on the interval: zeta = e^{i theta}
    Real theta = std::acos(std::clamp(iv.to_xi(x), -1.0, 1.0));
    Real acc = -c[0] * std::log(0.5 * iv.half());
    for (size_t k = 1; k < c.size(); ++k) acc += c[k] * std::cos(k * theta) / Real(k);
    return acc;
  }
  Complex zeta = joukowski_psi(iv, z);
  Complex inv = 1.0 / zeta;
  Real acc = -c[0] * std::log(0.5 * iv.half() * std::abs(zeta));
  Complex p = 1.0;
  for (size_t k = 1; k < c.size(); ++k) {
    p *= inv;
    acc += c[k] * p.real() / Real(k);
  }
  return acc;
}

Complex EquilibriumSolution::phi(int j, Complex z) const {
  const Interval& iv = interval(j);
  if (z.imag() == 0.0 && iv.contains(z.real()))
    fail(errc::on_support, "Phi_j is evaluated off Delta_j");
  const auto& craw = density_factor(j).coeffs();
  Real c0 = craw[0];
  // coefficients renormalized to exact unit mass keep Phi single-valued
  Complex zeta = joukowski_psi(iv, z);
  Complex inv = 1.0 / zeta;
  Complex expo = 0.0;
  Complex p = 1.0;
  for (size_t k = 1; k < craw.size(); ++k) {
    p *= inv;
    expo -= (craw[k] / c0) * p / Real(k);
  }
  return 0.5 * iv.half() * zeta * std::exp(expo);
}

EquilibriumSolution solve_vector_equilibrium(const std::vector<Interval>& intervals,
                                             const RaySpec& ray, Real tol, int max_sweeps,
                                             int grid_n, Real damping) {
  int m = static_cast<int>(intervals.size());
  if (m == 0) fail(errc::invalid_argument, "no intervals");
  if (ray.size() != m) fail(errc::invalid_ray, "ray length must match interval count");
  for (int j = 0; j + 1 < m; ++j)
    if (intervals[j].intersects(intervals[j + 1]))
      fail(errc::overlapping_supports, "consecutive intervals must be disjoint");
  if (!(tol > 0.0) || max_sweeps < 1 || !(damping > 0.0) || damping > 1.0)
    fail(errc::invalid_argument, "bad solver parameters");

  std::vector<std::vector<Real>> pts(m);
  for (int j = 0; j < m; ++j) pts[j] = cheb_points_first_kind(intervals[j], grid_n);

  // start from the arcsine measure of each interval
  std::vector<std::vector<Real>> u(m, std::vector<Real>(grid_n, 1.0));
  std::vector<Real> residuals;

  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    // Jacobi-style: all balayages read the previous iterate
    std::vector<std::vector<Real>> u_new(m);
    for (int j = 1; j <= m; ++j) {
      Real Pj = ray.P_at(j);
      Real cj = (ray.P_at(j - 1) + ray.P_at(j + 1)) / Pj;
      std::vector<Real> acc(grid_n, 1.0 - 0.5 * cj);
      for (int nb : {j - 1, j + 1}) {
        if (nb < 1 || nb > m) continue;
        Real coef = 0.5 * ray.P_at(nb) / Pj;
        if (coef == 0.0) continue;
        DiscreteMeasure nu = measure_from_factor(pts[nb - 1], u[nb - 1]);
        auto fac = balayage_factor(nu, intervals[j - 1], pts[j - 1]);
        for (int i = 0; i < grid_n; ++i) acc[i] += coef * fac[i];
      }
      u_new[j - 1] = std::move(acc);
    }
    Real change = 0.0;
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < grid_n; ++i) {
        Real next = (1.0 - damping) * u[j][i] + damping * u_new[j][i];
        change = std::max(change, std::abs(next - u[j][i]));
        u[j][i] = next;
      }
    residuals.push_back(change);
    if (change < tol) {
      EquilibriumSolution sol(intervals, ray, std::move(u), grid_n);
      sol.set_iteration_report(std::move(residuals));
      return sol;
    }
    // geometric-decrease guard after burn-in (windowed, rate 0.95 per sweep)
    size_t k = residuals.size();
    if (k > 10) {
      Real window = residuals[k - 1] / residuals[k - 6];
      if (window > std::pow(0.95, 5))
        fail(errc::no_convergence, "sweep residuals stopped decreasing geometrically");
    }
  }
  fail(errc::no_convergence, "equilibrium solver did not converge within max_sweeps");
}

Real equilibrium_residual(const EquilibriumSolution& sol) {
  int m = sol.size();
  Real worst = 0.0;
  for (int j = 1; j <= m; ++j) {
    const Interval& iv = sol.interval(j);
    for (Real x : cheb_points_first_kind(iv, 256)) {
      Real lhs = sol.potential(j, Complex(x, 0.0));
      if (j > 1)
        lhs -= 0.5 * (sol.ray().P_at(j - 1) / sol.ray().P_at(j)) *
               sol.potential(j - 1, Complex(x, 0.0));
      if (j < m)
        lhs -= 0.5 * (sol.ray().P_at(j + 1) / sol.ray().P_at(j)) *
               sol.potential(j + 1, Complex(x, 0.0));
      worst = std::max(worst, std::abs(lhs - sol.omega(j)));
    }
  }
  return worst;
}

}  // namespace mlhp
