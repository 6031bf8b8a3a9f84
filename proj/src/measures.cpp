#include "mlhp/measures.hpp"

#include <algorithm>
#include <cmath>

namespace mlhp {

namespace {

Real modifier_mass(const Interval& iv, Real alpha, Real beta, const ChebSeries& modifier) {
  // adaptive node doubling until two successive results agree
  Real prev = 0.0;
  for (int n = 32; n <= 4096; n *= 2) {
    QuadratureRule r = gauss_jacobi_rule(iv, alpha, beta, n);
    Real acc = 0.0;
    for (int i = 0; i < r.size(); ++i) acc += r.weights[i] * modifier(r.nodes[i]);
    if (n > 32 && std::abs(acc - prev) <= 1e-14 * std::abs(acc)) return acc;
    prev = acc;
  }
  return prev;
}

}  // namespace

MeasureSpec::MeasureSpec(Interval support, Real alpha, Real beta, ChebSeries modifier,
                         bool mass_normalized)
    : support_(support),
      alpha_(alpha),
      beta_(beta),
      modifier_(std::move(modifier)),
      normalized_(mass_normalized) {
  if (!(alpha_ > -1.0) || !(beta_ > -1.0))
    fail(errc::invalid_exponent, "Jacobi exponents must exceed -1");
  if (modifier_.domain().a != support_.a || modifier_.domain().b != support_.b)
    fail(errc::grid_mismatch, "modifier must live on the measure's interval");
  // strict positivity on a 512-point grid
  for (Real x : cheb_points_second_kind(support_, 512))
    if (!(modifier_(x) > 0.0))
      fail(errc::invalid_measure, "modifier must be strictly positive on the interval");
  raw_mass_ = modifier_mass(support_, alpha_, beta_, modifier_);
}

Real MeasureSpec::density(Real x) const {
  return std::pow(support_.b - x, alpha_) * std::pow(x - support_.a, beta_) * smooth_factor(x);
}

Real MeasureSpec::smooth_factor(Real x) const {
  Real g = modifier_(x);
  return normalized_ ? g / raw_mass_ : g;
}

QuadratureRule MeasureSpec::rule(int n_nodes) const {
  QuadratureRule r = gauss_jacobi_rule(support_, alpha_, beta_, n_nodes);
  for (int i = 0; i < r.size(); ++i) r.weights[i] *= smooth_factor(r.nodes[i]);
  return r;
}

MeasureSpec MeasureSpec::arcsine(Interval iv) {
  return MeasureSpec(iv, -0.5, -0.5, ChebSeries::constant(iv, 1.0), true);
}

Real szego_integral(const MeasureSpec& spec) {
  // ln rho = alpha ln(b-x) + beta ln(x-a) + ln(smooth factor); the log terms
  // have mean value ln((b-a)/4) against d eta / pi, and eta has mass pi.
  const Interval& iv = spec.support();
  Real log_edges = (spec.alpha() + spec.beta()) * std::log(iv.width() / 4.0);
  Real prev = 0.0;
  for (int n = 64; n <= 4096; n *= 2) {
    Real acc = 0.0;
    for (int i = 0; i < n; ++i) {
      Real theta = kPi * (2.0 * i + 1.0) / (2.0 * n);
      Real x = iv.from_xi(std::cos(theta));
      acc += std::log(spec.smooth_factor(x));
    }
    acc = acc * kPi / n;
    if (n > 64 && std::abs(acc - prev) <= 1e-13 * (1.0 + std::abs(acc)))
      return kPi * log_edges + acc;
    prev = acc;
  }
  fail(errc::divergent, "szego_integral did not stabilize; density outside supported class");
}

Complex cauchy_transform(const MeasureSpec& spec, Complex z) {
  if (z.imag() == 0.0 && spec.support().contains(z.real()))
    fail(errc::on_support, "cauchy_transform on the support");
  Complex prev = 0.0;
  for (int n = 64; n <= 4096; n *= 2) {
    QuadratureRule r = spec.rule(n);
    Complex acc = 0.0;
    for (int i = 0; i < r.size(); ++i) acc += r.weights[i] / (z - r.nodes[i]);
    if (n > 64 && std::abs(acc - prev) <= 1e-11 * std::abs(acc)) return acc;
    prev = acc;
  }
  return prev;
}

NikishinSystem::NikishinSystem(std::vector<MeasureSpec> generators, int quad_nodes)
    : gens_(std::move(generators)), quad_nodes_(quad_nodes) {
  if (gens_.empty()) fail(errc::invalid_argument, "need at least one generating measure");
  if (quad_nodes_ < 8) fail(errc::invalid_argument, "quad_nodes too small");
  int m = size();
  for (int j = 0; j + 1 < m; ++j)
    if (gens_[j].support().intersects(gens_[j + 1].support()))
      fail(errc::overlapping_supports, "consecutive intervals must be disjoint");

  rules_.reserve(m);
  for (int j = 0; j < m; ++j) rules_.push_back(gens_[j].rule(quad_nodes_));

  // fill s^_{j+1,k} at sigma_j nodes in increasing span order
  inner_.assign(m, {});
  for (int j = 1; j <= m; ++j)
    inner_[j - 1].push_back(std::vector<Real>(quad_nodes_, 1.0));  // k == j
  for (int span = 1; span < m; ++span) {
    for (int j = 1; j + span <= m; ++j) {
      int k = j + span;
      // values of s^_{j+1,k} at nodes of sigma_j: integrate over sigma_{j+1}
      const QuadratureRule& inner_rule = rules_[j];  // sigma_{j+1}
      const std::vector<Real>& deeper = inner_[j][k - (j + 1)];
      std::vector<Real> vals(quad_nodes_);
      for (int i = 0; i < quad_nodes_; ++i) {
        Real x = rules_[j - 1].nodes[i];
        Real acc = 0.0;
        for (int t = 0; t < inner_rule.size(); ++t)
          acc += inner_rule.weights[t] * deeper[t] / (x - inner_rule.nodes[t]);
        vals[i] = acc;
      }
      inner_[j - 1].push_back(std::move(vals));
    }
  }
}

const MeasureSpec& NikishinSystem::sigma(int j) const {
  if (j < 1 || j > size()) fail(errc::index_out_of_range, "generator index");
  return gens_[j - 1];
}

const QuadratureRule& NikishinSystem::sigma_rule(int j) const {
  if (j < 1 || j > size()) fail(errc::index_out_of_range, "generator index");
  return rules_[j - 1];
}

void NikishinSystem::check_indices(int j, int k) const {
  if (j < 1 || k < j || k > size()) fail(errc::index_out_of_range, "need 1 <= j <= k <= m");
}

const std::vector<Real>& NikishinSystem::inner_density_on_nodes(int j, int k) const {
  check_indices(j, k);
  return inner_[j - 1][k - j];
}

Complex NikishinSystem::shat(int j, int k, Complex z) const {
  check_indices(j, k);
  const QuadratureRule& r = rules_[j - 1];
  if (z.imag() == 0.0 && r.interval.contains(z.real()))
    fail(errc::on_support, "shat evaluated on Delta_j");
  const std::vector<Real>& dens = inner_[j - 1][k - j];
  Complex acc = 0.0;
  for (int i = 0; i < r.size(); ++i) acc += r.weights[i] * dens[i] / (z - r.nodes[i]);
  return acc;
}

Complex NikishinSystem::shat_derivative(int j, int k, Complex z) const {
  check_indices(j, k);
  const QuadratureRule& r = rules_[j - 1];
  if (z.imag() == 0.0 && r.interval.contains(z.real()))
    fail(errc::on_support, "shat evaluated on Delta_j");
  const std::vector<Real>& dens = inner_[j - 1][k - j];
  Complex acc = 0.0;
  for (int i = 0; i < r.size(); ++i) {
    Complex dz = z - r.nodes[i];
    acc -= r.weights[i] * dens[i] / (dz * dz);
  }
  return acc;
}

std::vector<Real> NikishinSystem::nested_moments(int j, int k, int max_degree) const {
  check_indices(j, k);
  const QuadratureRule& r = rules_[j - 1];
  const std::vector<Real>& dens = inner_[j - 1][k - j];
  std::vector<Real> mom(max_degree + 1, 0.0);
  for (int i = 0; i < r.size(); ++i) {
    Real base = r.weights[i] * dens[i];
    Real p = 1.0;
    for (int nu = 0; nu <= max_degree; ++nu) {
      mom[nu] += base * p;
      p *= r.nodes[i];
    }
  }
  return mom;
}

NikishinSystem NikishinSystem::reversed() const {
  std::vector<MeasureSpec> rev(gens_.rbegin(), gens_.rend());
  return NikishinSystem(std::move(rev), quad_nodes_);
}

Complex NikishinSystem::shat_descending(const NikishinSystem& rev, int k, int j, Complex z) {
  if (k == j - 1) return Complex(1.0, 0.0);  // empty chain convention
  int m = rev.size();
  if (k < j || j < 1 || k > m) fail(errc::index_out_of_range, "descending chain indices");
  return rev.shat(m + 1 - k, m + 1 - j, z);
}

}  // namespace mlhp
