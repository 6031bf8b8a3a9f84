#include <cmath>

#include "doctest.h"
#include "mlhp/measures.hpp"

using namespace mlhp;

namespace {

NikishinSystem demo_pair(int quad = 128) {
  std::vector<MeasureSpec> gens;
  gens.push_back(MeasureSpec::arcsine(Interval(-1, 1)));
  gens.push_back(MeasureSpec::arcsine(Interval(2, 3)));
  return NikishinSystem(std::move(gens), quad);
}

}  // namespace

TEST_CASE("szego_integral closed forms") {
  Interval iv(-1, 1);
  // arcsine probability density 1/(pi sqrt(1-x^2)):
  // integral of ln rho d eta = -pi ln pi - int ln sqrt(1-x^2) d eta
  //                          = -pi ln pi + pi ln 2
  MeasureSpec arc(iv, -0.5, -0.5, ChebSeries::constant(iv, 1.0 / kPi), false);
  CHECK(szego_integral(arc) == doctest::Approx(kPi * (std::log(2.0) - std::log(kPi))).epsilon(1e-12));

  // lebesgue: ln 1 = 0
  MeasureSpec leb(iv, 0.0, 0.0, ChebSeries::constant(iv, 1.0), false);
  CHECK(std::abs(szego_integral(leb)) < 1e-12);

  // semicircle-type sqrt weight: int ln sqrt(1-x^2) d eta = -pi ln 2
  MeasureSpec semi(iv, 0.5, 0.5, ChebSeries::constant(iv, 1.0), false);
  CHECK(szego_integral(semi) == doctest::Approx(-kPi * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("cauchy_transform of arcsine and far field") {
  MeasureSpec arc = MeasureSpec::arcsine(Interval(-1, 1));
  Complex v = cauchy_transform(arc, Complex(2, 0));
  CHECK(v.real() == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-10));

  MeasureSpec leb(Interval(-1, 1), 0.0, 0.0, ChebSeries::constant(Interval(-1, 1), 1.0), true);
  for (Real z : {1e3, 1e4}) {
    Complex t = cauchy_transform(leb, Complex(z, 0));
    CHECK((z * t).real() == doctest::Approx(1.0).epsilon(1e-5));
  }
  // left of the interval the transform is negative
  CHECK(cauchy_transform(leb, Complex(-3, 0)).real() < 0.0);
  CHECK_THROWS_AS(cauchy_transform(leb, Complex(0.2, 0.0)), Error);
}

TEST_CASE("measure construction guards") {
  Interval iv(-1, 1);
  CHECK_THROWS_AS(MeasureSpec(iv, -1.2, 0.0, ChebSeries::constant(iv, 1.0)), Error);
  // modifier with a sign change on the interval: 0.1 + T1
  CHECK_THROWS_AS(MeasureSpec(iv, 0.0, 0.0, ChebSeries(iv, {0.1, 1.0})), Error);
}

TEST_CASE("nikishin system rejects touching consecutive intervals") {
  std::vector<MeasureSpec> gens;
  gens.push_back(MeasureSpec::arcsine(Interval(-1, 1)));
  gens.push_back(MeasureSpec::arcsine(Interval(1, 2)));
  CHECK_THROWS_AS(NikishinSystem(std::move(gens)), Error);
}

TEST_CASE("shat base case matches cauchy_transform") {
  NikishinSystem sys = demo_pair();
  for (Complex z : {Complex(1.7, 0.4), Complex(-2.5, 0.0), Complex(0.0, 3.0)}) {
    Complex a = sys.shat(1, 1, z);
    Complex b = cauchy_transform(sys.sigma(1), z);
    CHECK(std::abs(a - b) <= 1e-12 * std::abs(b));
  }
}

TEST_CASE("shat sign structure and symmetry") {
  NikishinSystem sys = demo_pair();
  // sigma^_2 < 0 on Delta_1, hence mass of s_{1,2} is negative
  auto mom = sys.nested_moments(1, 2, 0);
  CHECK(mom[0] < 0.0);
  // z*shat(z) = mass + m1/z + O(1/z^2): Richardson across z = 1e3, 1e4
  Real f1 = (1e3 * sys.shat(1, 2, Complex(1e3, 0))).real();
  Real f2 = (1e4 * sys.shat(1, 2, Complex(1e4, 0))).real();
  Real extrap = (10.0 * f2 - f1) / 9.0;
  CHECK(extrap == doctest::Approx(mom[0]).epsilon(1e-6));
  CHECK(f2 == doctest::Approx(mom[0]).epsilon(1e-3));
  Complex z0(0.4, 1.3);
  CHECK(std::abs(sys.shat(1, 2, std::conj(z0)) - std::conj(sys.shat(1, 2, z0))) < 1e-15);
  CHECK_THROWS_AS(sys.shat(1, 2, Complex(0.5, 0.0)), Error);
  CHECK_THROWS_AS(sys.shat(0, 1, Complex(5.0, 0.0)), Error);
  CHECK_THROWS_AS(sys.shat(1, 3, Complex(5.0, 0.0)), Error);
}

TEST_CASE("shat is real of constant sign on neighbor intervals") {
  std::vector<MeasureSpec> gens;
  gens.push_back(MeasureSpec::arcsine(Interval(-1, 1)));
  gens.push_back(MeasureSpec::arcsine(Interval(2, 3)));
  gens.push_back(MeasureSpec(Interval(4, 5), 0.0, 0.0,
                             ChebSeries::constant(Interval(4, 5), 1.0), true));
  NikishinSystem sys(std::move(gens), 96);
  // s^_{2,3} on a Delta_1 grid: real, one sign
  int sign = 0;
  for (Real x : cheb_points_first_kind(sys.interval(1), 33)) {
    Complex v = sys.shat(2, 3, Complex(x, 0));
    CHECK(std::abs(v.imag()) < 1e-15);
    int s = v.real() > 0 ? 1 : -1;
    if (sign == 0) sign = s;
    CHECK(s == sign);
  }
}

TEST_CASE("nested moments against brute-force double quadrature") {
  NikishinSystem sys = demo_pair(160);
  // independent oracle: explicit double loop over two fresh rules
  QuadratureRule r1 = sys.sigma(1).rule(200);
  QuadratureRule r2 = sys.sigma(2).rule(200);
  for (int nu = 0; nu <= 4; ++nu) {
    Real brute = 0.0;
    for (int i = 0; i < r1.size(); ++i) {
      Real inner = 0.0;
      for (int t = 0; t < r2.size(); ++t) inner += r2.weights[t] / (r1.nodes[i] - r2.nodes[t]);
      brute += r1.weights[i] * std::pow(r1.nodes[i], nu) * inner;
    }
    auto mom = sys.nested_moments(1, 2, nu);
    CHECK(mom[nu] == doctest::Approx(brute).epsilon(1e-10));
  }
  // mass-normalized generator, nu = 0, j = k: mass 1
  CHECK(sys.nested_moments(1, 1, 0)[0] == doctest::Approx(1.0).epsilon(1e-13));
  // arcsine second moment: 1/2
  CHECK(sys.nested_moments(1, 1, 2)[2] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("reversed system and descending transforms") {
  NikishinSystem sys = demo_pair();
  NikishinSystem rev = sys.reversed();
  CHECK(rev.interval(1).a == 2.0);
  Complex z(0.5, 2.0);
  // descending chain of length one is the plain transform of sigma_k
  Complex a = NikishinSystem::shat_descending(rev, 2, 2, z);
  Complex b = cauchy_transform(sys.sigma(2), z);
  CHECK(std::abs(a - b) <= 1e-11 * std::abs(b));
  // empty chain convention
  CHECK(NikishinSystem::shat_descending(rev, 1, 2, z) == Complex(1.0, 0.0));
  // s^_{2,1} = <sigma_2, sigma_1>^ equals the reversed system's s^_{1,2}
  Complex c = NikishinSystem::shat_descending(rev, 2, 1, z);
  Complex d = rev.shat(1, 2, z);
  CHECK(std::abs(c - d) == 0.0);
}
