#include "mlhp/szego.hpp"

#include <algorithm>
#include <cmath>

namespace mlhp {

SzegoFunction::SzegoFunction(Interval iv, Real gamma_b, Real gamma_a, ChebSeries smooth_log)
    : iv_(iv), gamma_b_(gamma_b), gamma_a_(gamma_a), smooth_(std::move(smooth_log)) {
  if (smooth_.domain().a != iv_.a || smooth_.domain().b != iv_.b)
    fail(errc::grid_mismatch, "smooth log part must live on the Szego interval");
  log_const_ =
      -0.5 * ((gamma_a_ + gamma_b_) * std::log(iv_.width() / 4.0) + smooth_.coeffs()[0]);
}

SzegoFunction SzegoFunction::from_measure(const MeasureSpec& spec, int grid_n) {
  const Interval& iv = spec.support();
  auto pts = cheb_points_first_kind(iv, grid_n);
  std::vector<Real> s(grid_n);
  for (int i = 0; i < grid_n; ++i) s[i] = std::log(spec.smooth_factor(pts[i]));
  return SzegoFunction(iv, spec.alpha() + 0.5, spec.beta() + 0.5,
                       cheb_fit_first_kind(iv, s));
}

SzegoFunction SzegoFunction::from_weight_samples(const Interval& iv,
                                                 std::span<const Real> samples) {
  int n = static_cast<int>(samples.size());
  if (n < 8) fail(errc::size_mismatch, "need at least 8 weight samples");
  auto pts = cheb_points_first_kind(iv, n);
  std::vector<Real> u(n), r(n);
  for (int i = 0; i < n; ++i) {
    if (!(samples[i] > 0.0)) fail(errc::nonpositive_weight, "weight samples must be positive");
    Real edge = std::sqrt((iv.b - pts[i]) * (pts[i] - iv.a));
    u[i] = std::log(edge * samples[i]);
    r[i] = std::log(samples[i]);
  }
  // choose the split with the faster-decaying Chebyshev tail: gamma = 0
  // (u analytic, e.g. arcsine-type) vs gamma = 1/2 (mu' analytic, e.g.
  // Lebesgue-type)
  ChebSeries fit_u = cheb_fit_first_kind(iv, u);
  ChebSeries fit_r = cheb_fit_first_kind(iv, r);
  auto tail = [&](const ChebSeries& c) {
    const auto& v = c.coeffs();
    size_t start = v.size() - std::max<size_t>(1, v.size() / 4);
    Real t = 0.0;
    for (size_t k = start; k < v.size(); ++k) t = std::max(t, std::abs(v[k]));
    return t;
  };
  if (tail(fit_u) <= tail(fit_r)) return SzegoFunction(iv, 0.0, 0.0, std::move(fit_u));
  return SzegoFunction(iv, 0.5, 0.5, std::move(fit_r));
}

Complex SzegoFunction::eval(Complex z) const {
  if (z.imag() == 0.0 && iv_.contains(z.real()))
    fail(errc::on_support, "Szego function evaluated on its interval");
  Complex psi = joukowski_psi(iv_, z);
  Complex inv = 1.0 / psi;
  const auto& s = smooth_.coeffs();
  Complex expo = Complex(log_const_, 0.0);
  Complex p = 1.0;
  for (size_t k = 1; k < s.size(); ++k) {
    p *= inv;
    expo -= 0.5 * s[k] * p;
  }
  expo -= gamma_b_ * std::log(1.0 - inv);
  expo -= gamma_a_ * std::log(1.0 + inv);
  return std::exp(expo);
}

Real SzegoFunction::eval_real(Real x) const {
  if (iv_.contains(x)) fail(errc::on_support, "Szego function evaluated on its interval");
  Real w = iv_.to_xi(x);
  Real psi = w + std::copysign(std::sqrt(w * w - 1.0), w);
  Real inv = 1.0 / psi;
  const auto& s = smooth_.coeffs();
  Real expo = log_const_;
  Real p = 1.0;
  for (size_t k = 1; k < s.size(); ++k) {
    p *= inv;
    expo -= 0.5 * s[k] * p;
  }
  expo -= gamma_b_ * std::log(1.0 - inv);
  expo -= gamma_a_ * std::log(1.0 + inv);
  return std::exp(expo);
}

Real SzegoFunction::eval_inf() const { return std::exp(log_const_); }

Real SzegoFunction::boundary_log_weight(Real x) const {
  if (!iv_.strictly_contains(x))
    fail(errc::on_support, "boundary weight needs an interior point");
  return gamma_b_ * std::log(iv_.b - x) + gamma_a_ * std::log(x - iv_.a) + smooth_(x);
}

Complex szego_function(const Interval& iv, std::span<const Real> weight_samples, Complex z) {
  return SzegoFunction::from_weight_samples(iv, weight_samples).eval(z);
}

Real szego_function_inf(const Interval& iv, std::span<const Real> weight_samples) {
  return SzegoFunction::from_weight_samples(iv, weight_samples).eval_inf();
}

Real harmonic_extension(const Interval& iv, std::span<const Real> boundary_samples, Complex z) {
  if (z.imag() == 0.0 && iv.contains(z.real()))
    fail(errc::on_support, "harmonic extension evaluated on the interval");
  ChebSeries c = cheb_fit_first_kind(iv, boundary_samples);
  Complex inv = 1.0 / joukowski_psi(iv, z);
  const auto& v = c.coeffs();
  Real acc = v[0];
  Complex p = 1.0;
  for (size_t k = 1; k < v.size(); ++k) {
    p *= inv;
    acc += v[k] * p.real();
  }
  return acc;
}

Real harmonic_extension_inf(const Interval& iv, std::span<const Real> boundary_samples) {
  return cheb_fit_first_kind(iv, boundary_samples).coeffs()[0];
}

BoundaryVectorFunction BoundaryVectorFunction::ones(const std::vector<Interval>& intervals,
                                                    int grid_n) {
  BoundaryVectorFunction f;
  f.intervals_ = intervals;
  f.grid_n_ = grid_n;
  int m = f.size();
  f.left_.resize(m);
  f.right_.resize(m);
  for (int j = 1; j <= m; ++j) {
    if (j > 1) f.left_[j - 1].assign(grid_n, 1.0);
    if (j < m) f.right_[j - 1].assign(grid_n, 1.0);
  }
  return f;
}

bool BoundaryVectorFunction::same_geometry(const BoundaryVectorFunction& o) const {
  if (size() != o.size() || grid_n_ != o.grid_n_) return false;
  for (int j = 0; j < size(); ++j)
    if (intervals_[j].a != o.intervals_[j].a || intervals_[j].b != o.intervals_[j].b) return false;
  return true;
}

void BoundaryVectorFunction::check_positive() const {
  for (int j = 1; j <= size(); ++j) {
    for (Real v : left(j))
      if (!(v > 0.0)) fail(errc::nonpositive_input, "boundary vector must be strictly positive");
    for (Real v : right(j))
      if (!(v > 0.0)) fail(errc::nonpositive_input, "boundary vector must be strictly positive");
  }
}

Real metric_d(const BoundaryVectorFunction& f, const BoundaryVectorFunction& g) {
  if (!f.same_geometry(g)) fail(errc::grid_mismatch, "metric_d needs matching grids");
  f.check_positive();
  g.check_positive();
  Real d = 0.0;
  for (int j = 1; j <= f.size(); ++j) {
    for (size_t i = 0; i < f.left(j).size(); ++i)
      d = std::max(d, std::abs(std::log(f.left(j)[i] / g.left(j)[i])));
    for (size_t i = 0; i < f.right(j).size(); ++i)
      d = std::max(d, std::abs(std::log(f.right(j)[i] / g.right(j)[i])));
  }
  return d;
}

SzegoWeightVector SzegoWeightVector::from_system(const NikishinSystem& system, int grid_n) {
  SzegoWeightVector w;
  int m = system.size();
  w.grid_n_ = grid_n;
  for (int j = 1; j <= m; ++j) {
    const MeasureSpec& sigma = system.sigma(j);
    const Interval& iv = sigma.support();
    w.intervals_.push_back(iv);
    w.gamma_b_.push_back(sigma.alpha() + 0.5);
    w.gamma_a_.push_back(sigma.beta() + 0.5);
    auto pts = cheb_points_first_kind(iv, grid_n);
    std::vector<Real> s(grid_n);
    for (int i = 0; i < grid_n; ++i) {
      Real v = std::log(sigma.smooth_factor(pts[i]));
      if (j < m) {
        const Interval& next = system.interval(j + 1);
        v -= 0.5 * (std::log(std::abs(pts[i] - next.b)) + std::log(std::abs(pts[i] - next.a)));
      }
      s[i] = v;
    }
    w.smooth_log_.push_back(std::move(s));
  }
  return w;
}

SzegoWeightVector SzegoWeightVector::custom(std::vector<Interval> intervals,
                                            std::vector<Real> gamma_b, std::vector<Real> gamma_a,
                                            std::vector<std::vector<Real>> smooth_log,
                                            int grid_n) {
  SzegoWeightVector w;
  w.intervals_ = std::move(intervals);
  w.gamma_b_ = std::move(gamma_b);
  w.gamma_a_ = std::move(gamma_a);
  w.smooth_log_ = std::move(smooth_log);
  w.grid_n_ = grid_n;
  size_t m = w.intervals_.size();
  if (w.gamma_a_.size() != m || w.gamma_b_.size() != m || w.smooth_log_.size() != m)
    fail(errc::size_mismatch, "weight vector component counts disagree");
  for (auto& s : w.smooth_log_)
    if (static_cast<int>(s.size()) != grid_n)
      fail(errc::grid_mismatch, "smooth log samples must match the grid");
  return w;
}

std::vector<Real> SzegoWeightVector::weight_values(int j) const {
  const Interval& iv = intervals_.at(j - 1);
  auto pts = cheb_points_first_kind(iv, grid_n_);
  std::vector<Real> out(grid_n_);
  for (int i = 0; i < grid_n_; ++i) {
    Real x = pts[i];
    out[i] = std::pow(iv.b - x, gamma_b_[j - 1]) * std::pow(x - iv.a, gamma_a_[j - 1]) *
             std::exp(smooth_log_[j - 1][i]);
  }
  return out;
}

TApplication apply_T_full(const SzegoWeightVector& w, const BoundaryVectorFunction& f) {
  int m = w.size();
  if (f.size() != m || f.grid_size() != w.grid_size())
    fail(errc::grid_mismatch, "weight and boundary vector geometry disagree");
  f.check_positive();
  int n = w.grid_size();

  TApplication out;
  out.components.reserve(m);
  for (int j = 1; j <= m; ++j) {
    const Interval& iv = w.intervals()[j - 1];
    // u_j = gamma ln-edges + [smooth_log(w_j) - ln f_{j-1} - ln f_{j+1}]
    std::vector<Real> s(n);
    for (int i = 0; i < n; ++i) {
      Real v = w.smooth_log(j)[i];
      if (j > 1) v -= std::log(f.right(j - 1)[i]);
      if (j < m) v -= std::log(f.left(j + 1)[i]);
      s[i] = v;
    }
    out.components.emplace_back(iv, w.gamma_b(j), w.gamma_a(j),
                                cheb_fit_first_kind(iv, s));
  }

  out.boundary = BoundaryVectorFunction::ones(w.intervals(), n);
  for (int j = 1; j <= m; ++j) {
    const SzegoFunction& G = out.components[j - 1];
    if (j > 1) {
      auto pts = cheb_points_first_kind(w.intervals()[j - 2], n);
      for (int i = 0; i < n; ++i) out.boundary.left(j)[i] = G.eval_real(pts[i]);
    }
    if (j < m) {
      auto pts = cheb_points_first_kind(w.intervals()[j], n);
      for (int i = 0; i < n; ++i) out.boundary.right(j)[i] = G.eval_real(pts[i]);
    }
  }
  return out;
}

BoundaryVectorFunction apply_T(const SzegoWeightVector& w, const BoundaryVectorFunction& f) {
  return apply_T_full(w, f).boundary;
}

ContractionConstant contraction_constant(int m) {
  if (m < 2) fail(errc::invalid_argument, "contraction constant defined for m >= 2");
  int mbar = (m + 1) / 2;
  long pow2 = 1L << mbar;
  if (m % 2 == 0) return {pow2 - 1, pow2};
  return {pow2 - 2, pow2};
}

SzegoVector fixed_point_T(const SzegoWeightVector& w, Real tol, int max_iter) {
  if (!(tol > 0.0) || max_iter < 1) fail(errc::invalid_argument, "bad fixed-point parameters");
  BoundaryVectorFunction f = BoundaryVectorFunction::ones(w.intervals(), w.grid_size());
  std::vector<Real> distances;
  for (int it = 1; it <= max_iter; ++it) {
    TApplication next = apply_T_full(w, f);
    Real d = metric_d(next.boundary, f);
    distances.push_back(d);
    f = std::move(next.boundary);
    if (d < tol || w.size() == 1) {
      SzegoVector out;
      out.G = std::move(next.components);
      out.boundary = std::move(f);
      out.iteration_distances = std::move(distances);
      return out;
    }
  }
  fail(errc::no_convergence, "T_w iteration failed to converge (numerics bug for valid input)");
}

Real boundcond_residual(const SzegoVector& G, const NikishinSystem& system) {
  int m = system.size();
  if (G.size() != m) fail(errc::geometry_mismatch, "component count disagrees with the system");
  for (int j = 1; j <= m; ++j) {
    const Interval& a = G.G[j - 1].interval();
    const Interval& b = system.interval(j);
    if (a.a != b.a || a.b != b.b)
      fail(errc::geometry_mismatch, "Szego vector intervals disagree with the system");
  }
  Real worst = 0.0;
  for (int j = 1; j <= m; ++j) {
    const Interval& iv = system.interval(j);
    auto pts = cheb_points_first_kind(iv, 256);
    Real scale = 0.0;
    std::vector<Real> lhs(pts.size()), rhs(pts.size());
    for (size_t i = 0; i < pts.size(); ++i) {
      Real x = pts[i];
      lhs[i] = G.boundary_sq_modulus(j, x) * std::sqrt((iv.b - x) * (x - iv.a)) *
               system.sigma(j).density(x);
      Real r = 1.0;
      if (j < m) {
        const Interval& next = system.interval(j + 1);
        r = std::sqrt(std::abs(x - next.b) * std::abs(x - next.a));
      }
      if (j > 1) r *= G.G[j - 2].eval_real(x);
      if (j < m) r *= G.G[j].eval_real(x);
      rhs[i] = r;
      scale = std::max(scale, std::abs(r));
    }
    if (scale == 0.0) scale = 1.0;
    for (size_t i = 0; i < pts.size(); ++i)
      worst = std::max(worst, std::abs(lhs[i] - rhs[i]) / scale);
  }
  return worst;
}

}  // namespace mlhp
