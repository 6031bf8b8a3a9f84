#include "mlhp/cheb.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace mlhp {

const char* errc_name(errc c) {
  switch (c) {
    case errc::invalid_argument: return "invalid-argument";
    case errc::degenerate_interval: return "degenerate-interval";
    case errc::invalid_exponent: return "invalid-exponent";
    case errc::on_support: return "on-support";
    case errc::size_mismatch: return "size-mismatch";
    case errc::no_convergence: return "no-convergence";
    case errc::overlapping_supports: return "overlapping-supports";
    case errc::index_out_of_range: return "index-out-of-range";
    case errc::grid_mismatch: return "grid-mismatch";
    case errc::nonpositive_input: return "nonpositive-input";
    case errc::nonpositive_weight: return "nonpositive-weight";
    case errc::geometry_mismatch: return "geometry-mismatch";
    case errc::singular_system: return "singular-system";
    case errc::degree_cap_exceeded: return "degree-cap-exceeded";
    case errc::zero_count_mismatch: return "zero-count-mismatch";
    case errc::sign_not_constant: return "sign-not-constant";
    case errc::gram_singular: return "gram-singular";
    case errc::bimoment_singular: return "bimoment-singular";
    case errc::nonrealizable_ray: return "nonrealizable-ray";
    case errc::invalid_ray: return "invalid-ray";
    case errc::invalid_measure: return "invalid-measure";
    case errc::divergent: return "divergent";
    case errc::schema_error: return "schema-error";
    case errc::io_error: return "io-error";
  }
  return "error";
}

Complex slit_sqrt(const Interval& iv, Complex z) {
  Complex w = iv.to_xi(z);
  // principal sqrt(w-1)*sqrt(w+1) is the branch ~ w at infinity, positive
  // for w > 1 and negative for w < -1
  return iv.half() * std::sqrt(w - 1.0) * std::sqrt(w + 1.0);
}

Complex joukowski_psi(const Interval& iv, Complex z) {
  Complex w = iv.to_xi(z);
  return w + std::sqrt(w - 1.0) * std::sqrt(w + 1.0);
}

Real ChebSeries::operator()(Real x) const {
  Real xi = domain_.to_xi(x);
  Real b1 = 0.0, b2 = 0.0;
  for (int k = degree(); k >= 1; --k) {
    Real t = 2.0 * xi * b1 - b2 + coeffs_[k];
    b2 = b1;
    b1 = t;
  }
  return xi * b1 - b2 + coeffs_[0];
}

Complex ChebSeries::operator()(Complex z) const {
  Complex xi = domain_.to_xi(z);
  Complex b1 = 0.0, b2 = 0.0;
  for (int k = degree(); k >= 1; --k) {
    Complex t = 2.0 * xi * b1 - b2 + coeffs_[k];
    b2 = b1;
    b1 = t;
  }
  return xi * b1 - b2 + coeffs_[0];
}

Real ChebSeries::max_abs_coeff() const {
  Real m = 0.0;
  for (Real c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

ChebSeries ChebSeries::truncated(Real rel_tol) const {
  Real cut = rel_tol * max_abs_coeff();
  int last = 0;
  for (int k = 0; k <= degree(); ++k)
    if (std::abs(coeffs_[k]) > cut) last = k;
  std::vector<Real> c(coeffs_.begin(), coeffs_.begin() + last + 1);
  return ChebSeries(domain_, std::move(c));
}

ChebSeries ChebSeries::derivative() const {
  int n = degree();
  if (n == 0) return ChebSeries::constant(domain_, 0.0);
  // recurrence d_{k} = d_{k+2} + 2(k+1) c_{k+1} in xi coordinates
  std::vector<Real> dd(n + 2, 0.0);
  for (int k = n - 1; k >= 0; --k) dd[k] = dd[k + 2] + 2.0 * (k + 1) * coeffs_[k + 1];
  std::vector<Real> d(dd.begin(), dd.begin() + n);
  d[0] *= 0.5;
  Real scale = 2.0 / domain_.width();
  for (Real& v : d) v *= scale;
  return ChebSeries(domain_, std::move(d));
}

ChebSeries ChebSeries::times_linear(Real root) const {
  int n = degree();
  std::vector<Real> d(n + 2, 0.0);
  Real h = domain_.half();
  Real c0 = domain_.mid() - root;
  // (x - root) p = (mid - root) p + half * (xi p)
  for (int i = 0; i <= n; ++i) d[i] += c0 * coeffs_[i];
  d[1] += h * coeffs_[0];
  for (int i = 1; i <= n; ++i) {
    d[i + 1] += 0.5 * h * coeffs_[i];
    d[i - 1] += 0.5 * h * coeffs_[i];
  }
  return ChebSeries(domain_, std::move(d));
}

ChebSeries ChebSeries::deflate_at(Real x0) const {
  int n = degree();
  if (n == 0) return ChebSeries::constant(domain_, 0.0);
  Real xi0 = domain_.to_xi(x0);
  // Chebyshev synthetic division: (xi - xi0) * q~ = p - p(xi0), q = q~/half
  std::vector<Real> b(n + 2, 0.0);  // b[0..n-1] used; b[n], b[n+1] padding zeros
  b[n - 1] = 2.0 * coeffs_[n];
  for (int j = n - 1; j >= 2; --j) b[j - 1] = 2.0 * coeffs_[j] + 2.0 * xi0 * b[j] - b[j + 1];
  Real b0 = coeffs_[1] + xi0 * b[1] - 0.5 * b[2];
  std::vector<Real> q(n, 0.0);
  Real inv_h = 1.0 / domain_.half();
  q[0] = b0 * inv_h;
  for (int j = 1; j < n; ++j) q[j] = b[j] * inv_h;
  return ChebSeries(domain_, std::move(q));
}

ChebSeries& ChebSeries::operator+=(const ChebSeries& o) {
  if (o.domain_.a != domain_.a || o.domain_.b != domain_.b)
    fail(errc::grid_mismatch, "ChebSeries domains differ");
  if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size(), 0.0);
  for (size_t k = 0; k < o.coeffs_.size(); ++k) coeffs_[k] += o.coeffs_[k];
  return *this;
}

ChebSeries& ChebSeries::operator*=(Real s) {
  for (Real& c : coeffs_) c *= s;
  return *this;
}

std::vector<Real> cheb_points_second_kind(const Interval& iv, int n) {
  if (n < 2) fail(errc::invalid_argument, "need at least 2 second-kind points");
  std::vector<Real> x(n);
  for (int i = 0; i < n; ++i)
    x[i] = iv.mid() + iv.half() * std::cos(kPi * Real(n - 1 - i) / Real(n - 1));
  x.front() = iv.a;
  x.back() = iv.b;
  return x;
}

std::vector<Real> cheb_points_first_kind(const Interval& iv, int n) {
  if (n < 1) fail(errc::invalid_argument, "need at least 1 first-kind point");
  std::vector<Real> x(n);
  for (int i = 0; i < n; ++i)
    x[i] = iv.mid() + iv.half() * std::cos(kPi * (2.0 * Real(n - 1 - i) + 1.0) / (2.0 * Real(n)));
  return x;
}

ChebSeries cheb_interpolate(const Interval& iv, std::span<const Real> samples) {
  int n = static_cast<int>(samples.size());
  if (n < 2) fail(errc::size_mismatch, "need at least 2 samples");
  // samples are at ascending second-kind points; index by theta_i = i*pi/(n-1)
  // (descending in x), f[i] = samples[n-1-i]
  std::vector<Real> c(n, 0.0);
  for (int k = 0; k < n; ++k) {
    Real acc = 0.5 * (samples[n - 1] + (k % 2 == 0 ? samples[0] : -samples[0]));
    for (int i = 1; i < n - 1; ++i)
      acc += samples[n - 1 - i] * std::cos(kPi * Real(k) * Real(i) / Real(n - 1));
    c[k] = 2.0 * acc / Real(n - 1);
  }
  c[0] *= 0.5;
  c[n - 1] *= 0.5;
  return ChebSeries(iv, std::move(c));
}

ChebSeries cheb_fit_first_kind(const Interval& iv, std::span<const Real> samples) {
  int n = static_cast<int>(samples.size());
  if (n < 1) fail(errc::size_mismatch, "need at least 1 sample");
  std::vector<Real> c(n, 0.0);
  for (int k = 0; k < n; ++k) {
    Real acc = 0.0;
    for (int i = 0; i < n; ++i) {
      Real theta = kPi * (2.0 * Real(i) + 1.0) / (2.0 * Real(n));
      acc += samples[n - 1 - i] * std::cos(Real(k) * theta);
    }
    c[k] = 2.0 * acc / Real(n);
  }
  c[0] *= 0.5;
  return ChebSeries(iv, std::move(c));
}

namespace {

std::vector<Real> colleague_eigen_roots(const ChebSeries& s) {
  ChebSeries t = s.truncated(1e-13);
  int n = t.degree();
  const auto& c = t.coeffs();
  std::vector<Real> out;
  if (n == 0) return out;
  if (n == 1) {
    Real xi = -c[0] / c[1];
    if (xi > -1.0 && xi < 1.0) out.push_back(t.domain().from_xi(xi));
    return out;
  }
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  A(0, 1) = 1.0;
  for (int k = 1; k < n - 1; ++k) {
    A(k, k - 1) = 0.5;
    A(k, k + 1) = 0.5;
  }
  A(n - 1, n - 2) = 0.5;
  for (int k = 0; k < n; ++k) A(n - 1, k) -= 0.5 * c[k] / c[n];
  Eigen::EigenSolver<Eigen::MatrixXd> es(A, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) fail(errc::no_convergence, "colleague eigensolve failed");
  for (int k = 0; k < n; ++k) {
    std::complex<double> ev = es.eigenvalues()[k];
    if (std::abs(ev.imag()) < 1e-8 * (1.0 + std::abs(ev.real())) && std::abs(ev.real()) < 1.0 + 1e-10)
      out.push_back(t.domain().from_xi(ev.real()));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<Real> cheb_roots_in_interval(const ChebSeries& s,
                                         const std::function<Real(Real)>& fn,
                                         const std::function<Real(Real)>& dfn,
                                         Real residual_scale) {
  if (s.max_abs_coeff() == 0.0) fail(errc::invalid_argument, "zero series has no isolated roots");
  const Interval& iv = s.domain();
  // residual scale: typical magnitude of the evaluator on the interval
  Real scale = residual_scale;
  if (scale == 0.0)
    for (Real x : cheb_points_first_kind(iv, 64)) scale = std::max(scale, std::abs(fn(x)));
  if (scale == 0.0) scale = s.max_abs_coeff();

  std::vector<Real> seeds = colleague_eigen_roots(s);
  std::vector<Real> roots;
  for (Real seed : seeds) {
    Real x = std::clamp(seed, iv.a, iv.b);
    Real best_x = x, best_f = std::abs(fn(x));
    for (int it = 0; it < 50; ++it) {
      Real f = fn(x);
      if (std::abs(f) < best_f) {
        best_f = std::abs(f);
        best_x = x;
      }
      Real df = dfn(x);
      if (df == 0.0) break;
      Real step = f / df;
      Real xn = x - step;
      if (xn < iv.a - 0.05 * iv.width() || xn > iv.b + 0.05 * iv.width()) break;
      x = xn;
      if (std::abs(step) < 4.0 * std::numeric_limits<Real>::epsilon() * (1.0 + std::abs(x))) {
        Real fx = std::abs(fn(x));
        if (fx < best_f) {
          best_f = fx;
          best_x = x;
        }
        break;
      }
    }
    if (best_f > 1e-12 * scale)
      fail(errc::no_convergence, "Newton polish did not reach residual tolerance");
    if (best_x > iv.a && best_x < iv.b) roots.push_back(best_x);
  }
  std::sort(roots.begin(), roots.end());
  // drop polish-induced duplicates (roots are simple by contract)
  std::vector<Real> uniq;
  for (Real r : roots)
    if (uniq.empty() || std::abs(r - uniq.back()) > 1e-11 * iv.width()) uniq.push_back(r);
  return uniq;
}

std::vector<Real> cheb_roots_in_interval(const ChebSeries& s) {
  ChebSeries d = s.derivative();
  return cheb_roots_in_interval(
      s, [&](Real x) { return s(x); }, [&](Real x) { return d(x); });
}

ChebSeries monic_from_roots(const Interval& iv, std::span<const Real> roots) {
  ChebSeries p = ChebSeries::constant(iv, 1.0);
  for (Real r : roots) p = p.times_linear(r);
  return p;
}

}  // namespace mlhp
