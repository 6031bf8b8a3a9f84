#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <cmath>

namespace mlhp {

// Scalar seam: the library computes in `Real`; the Hermite-Pade moment
// assembly/solve is additionally templated so a wider type (long double)
// can be substituted when moment systems become ill-conditioned.
using Real = double;
using Complex = std::complex<Real>;

inline constexpr Real kPi = 3.14159265358979323846264338327950288;

/// Failure classes surfaced by the library. Names follow the operation
/// contracts so callers can dispatch on them.
enum class errc {
  invalid_argument,
  degenerate_interval,
  invalid_exponent,
  on_support,
  size_mismatch,
  no_convergence,
  overlapping_supports,
  index_out_of_range,
  grid_mismatch,
  nonpositive_input,
  nonpositive_weight,
  geometry_mismatch,
  singular_system,
  degree_cap_exceeded,
  zero_count_mismatch,
  sign_not_constant,
  gram_singular,
  bimoment_singular,
  nonrealizable_ray,
  invalid_ray,
  invalid_measure,
  divergent,
  schema_error,
  io_error,
};

const char* errc_name(errc c);

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  errc code() const { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw Error(code, what); }

/// Closed bounded interval [a,b], a < b.
struct Interval {
  Real a = -1.0;
  Real b = 1.0;

  Interval() = default;
  Interval(Real lo, Real hi) : a(lo), b(hi) {
    if (!(std::isfinite(lo) && std::isfinite(hi)) || !(lo < hi))
      fail(errc::degenerate_interval, "need finite a < b");
  }

  Real width() const { return b - a; }
  Real mid() const { return 0.5 * (a + b); }
  Real half() const { return 0.5 * (b - a); }

  bool contains(Real x) const { return x >= a && x <= b; }
  bool strictly_contains(Real x) const { return x > a && x < b; }
  bool intersects(const Interval& o) const { return !(b < o.a || o.b < a); }

  /// Map to normalized coordinate xi in [-1,1].
  Real to_xi(Real x) const { return (2.0 * x - a - b) / (b - a); }
  Complex to_xi(Complex z) const { return (2.0 * z - a - b) / (b - a); }
  Real from_xi(Real xi) const { return mid() + half() * xi; }

  Real distance(Complex z) const {
    Real x = z.real(), y = z.imag();
    Real dx = x < a ? a - x : (x > b ? x - b : 0.0);
    return std::hypot(dx, y);
  }
};

/// sqrt((z-a)(z-b)) on the slit plane, branch positive for z > b
/// (so ~ z at infinity and negative for real z < a).
Complex slit_sqrt(const Interval& iv, Complex z);

/// Exterior Joukowski coordinate psi(w) = w + sqrt(w^2-1) of w = xi(z);
/// |psi| > 1 off the interval, psi ~ 2w at infinity.
Complex joukowski_psi(const Interval& iv, Complex z);

}  // namespace mlhp
