#include "mlhp/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mlhp {

namespace {

// Symmetric tridiagonal QL with implicit shifts, tracking only the first
// row of the eigenvector matrix (all that Golub-Welsch needs). d = diagonal,
// e = subdiagonal (e[0..n-2]), z starts as (1,0,...,0). On return d holds
// ascending eigenvalues and z[i] the first component of eigenvector i.
void imtqlx(std::vector<Real>& d, std::vector<Real>& e, std::vector<Real>& z) {
  int n = static_cast<int>(d.size());
  if (n == 1) return;
  e.resize(n, 0.0);
  const int max_iter = 60;
  const Real prec = std::numeric_limits<Real>::epsilon();

  for (int l = 0; l < n; ++l) {
    int iter = 0;
    for (;;) {
      int m = l;
      for (; m < n - 1; ++m) {
        if (std::abs(e[m]) <= prec * (std::abs(d[m]) + std::abs(d[m + 1]))) break;
      }
      if (m == l) break;
      if (++iter > max_iter) fail(errc::no_convergence, "tridiagonal QL exceeded iterations");
      Real g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      Real r = std::hypot(g, 1.0);
      g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
      Real s = 1.0, c = 1.0, p = 0.0;
      for (int i = m - 1; i >= l; --i) {
        Real f = s * e[i];
        Real b = c * e[i];
        r = std::hypot(f, g);
        e[i + 1] = r;
        if (r == 0.0) {
          d[i + 1] -= p;
          e[m] = 0.0;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + 2.0 * c * b;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - b;
        Real zf = z[i + 1];
        z[i + 1] = s * z[i] + c * zf;
        z[i] = c * z[i] - s * zf;
      }
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    }
  }
  // sort ascending, carrying z along
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return d[a] < d[b]; });
  std::vector<Real> ds(n), zs(n);
  for (int i = 0; i < n; ++i) {
    ds[i] = d[idx[i]];
    zs[i] = z[idx[i]];
  }
  d = std::move(ds);
  z = std::move(zs);
}

QuadratureRule jacobi_golub_welsch(const Interval& iv, Real alpha, Real beta, int n) {
  // monic Jacobi recurrence coefficients on [-1,1] (Gautschi)
  Real ab = alpha + beta;
  std::vector<Real> d(n), e(n > 1 ? n - 1 : 0), z(n, 0.0);
  z[0] = 1.0;
  d[0] = (beta - alpha) / (ab + 2.0);
  for (int k = 1; k < n; ++k)
    d[k] = (beta * beta - alpha * alpha) / ((2.0 * k + ab) * (2.0 * k + ab + 2.0));
  if (n > 1) {
    Real b1 = 4.0 * (1.0 + alpha) * (1.0 + beta) / ((ab + 2.0) * (ab + 2.0) * (ab + 3.0));
    e[0] = std::sqrt(b1);
    for (int k = 2; k < n; ++k) {
      Real t = 2.0 * k + ab;
      Real bk = 4.0 * k * (k + alpha) * (k + beta) * (k + ab) / (t * t * (t + 1.0) * (t - 1.0));
      e[k - 1] = std::sqrt(bk);
    }
  }
  Real mu0 = std::pow(2.0, ab + 1.0) * std::exp(std::lgamma(alpha + 1.0) + std::lgamma(beta + 1.0) -
                                                std::lgamma(ab + 2.0));
  imtqlx(d, e, z);

  QuadratureRule rule;
  rule.interval = iv;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  Real scale = std::pow(iv.half(), ab + 1.0);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = iv.from_xi(d[i]);
    rule.weights[i] = scale * mu0 * z[i] * z[i];
  }
  return rule;
}

}  // namespace

QuadratureRule gauss_jacobi_rule(const Interval& iv, Real alpha, Real beta, int n_nodes) {
  if (!(alpha > -1.0) || !(beta > -1.0))
    fail(errc::invalid_exponent, "Jacobi exponents must exceed -1");
  if (n_nodes < 1) fail(errc::invalid_argument, "n_nodes must be positive");

  // closed forms for the Chebyshev cases
  if (alpha == -0.5 && beta == -0.5) {
    QuadratureRule rule;
    rule.interval = iv;
    rule.nodes.resize(n_nodes);
    rule.weights.assign(n_nodes, kPi / Real(n_nodes));
    for (int i = 0; i < n_nodes; ++i) {
      Real theta = kPi * (2.0 * Real(n_nodes - 1 - i) + 1.0) / (2.0 * Real(n_nodes));
      rule.nodes[i] = iv.from_xi(std::cos(theta));
    }
    return rule;
  }
  if (alpha == 0.5 && beta == 0.5) {
    QuadratureRule rule;
    rule.interval = iv;
    rule.nodes.resize(n_nodes);
    rule.weights.resize(n_nodes);
    Real scale = iv.half() * iv.half();
    for (int i = 0; i < n_nodes; ++i) {
      Real theta = kPi * Real(n_nodes - i) / Real(n_nodes + 1);
      Real s = std::sin(theta);
      rule.nodes[i] = iv.from_xi(std::cos(theta));
      rule.weights[i] = scale * kPi / Real(n_nodes + 1) * s * s;
    }
    return rule;
  }
  return jacobi_golub_welsch(iv, alpha, beta, n_nodes);
}

Complex cauchy_integral(const QuadratureRule& rule, std::span<const Real> density_values,
                        Complex z) {
  if (density_values.size() != rule.nodes.size())
    fail(errc::size_mismatch, "density values must match rule nodes");
  if (z.imag() == 0.0 && rule.interval.contains(z.real()))
    fail(errc::on_support, "cauchy_integral evaluated on the support interval");
  Complex acc = 0.0;
  for (size_t i = 0; i < rule.nodes.size(); ++i)
    acc += rule.weights[i] * density_values[i] / (z - rule.nodes[i]);
  return acc;
}

Complex cauchy_integral_derivative(const QuadratureRule& rule,
                                   std::span<const Real> density_values, Complex z) {
  if (density_values.size() != rule.nodes.size())
    fail(errc::size_mismatch, "density values must match rule nodes");
  if (z.imag() == 0.0 && rule.interval.contains(z.real()))
    fail(errc::on_support, "cauchy_integral evaluated on the support interval");
  Complex acc = 0.0;
  for (size_t i = 0; i < rule.nodes.size(); ++i) {
    Complex dz = z - rule.nodes[i];
    acc -= rule.weights[i] * density_values[i] / (dz * dz);
  }
  return acc;
}

}  // namespace mlhp
