#include <cmath>

#include "doctest.h"
#include "mlhp/asymptotics.hpp"

using namespace mlhp;

namespace {

NikishinSystem arcsine_chain(int m, int quad = 128) {
  std::vector<MeasureSpec> gens;
  gens.push_back(MeasureSpec::arcsine(Interval(-1, 1)));
  for (int j = 1; j < m; ++j)
    gens.push_back(MeasureSpec::arcsine(Interval(2.0 * j, 2.0 * j + 1.0)));
  return NikishinSystem(std::move(gens), quad);
}

struct Context {
  NikishinSystem sys;
  NikishinSystem rev;
  EquilibriumSolution eq;
  SzegoVector G;
};

Context make_context(int m, const RaySpec& ray, int quad = 128, int grid = 128) {
  NikishinSystem sys = arcsine_chain(m, quad);
  NikishinSystem rev = sys.reversed();
  std::vector<Interval> ivs;
  for (int j = 1; j <= m; ++j) ivs.push_back(sys.interval(j));
  EquilibriumSolution eq = solve_vector_equilibrium(ivs, ray, 1e-13, 2000, grid);
  SzegoWeightVector w = SzegoWeightVector::from_system(sys, grid);
  SzegoVector G = fixed_point_T(w, 1e-13, 300);
  return Context{std::move(sys), std::move(rev), std::move(eq), std::move(G)};
}

}  // namespace

TEST_CASE("m=1 ratios are exact for the arcsine system") {
  Context ctx = make_context(1, RaySpec::create({1.0}));
  for (int k : {4, 8, 16}) {
    HpSolution sol = hp_solve(ctx.sys, MultiIndex::create({k}));
    extract_Q(sol, ctx.sys);
    compute_normalization(sol, ctx.sys);
    Complex z(2.0, 0.0);
    auto t1 = zero_poly_ratio(sol, ctx.eq, ctx.G, 1, z);
    // lhs = (psi^k + psi^-k)/psi^k, rhs = 1
    Real psi = 2.0 + std::sqrt(3.0);
    CHECK(std::abs(t1.rhs - Complex(1.0, 0.0)) < 1e-12);
    CHECK(t1.abs_dev == doctest::Approx(std::pow(psi, -2.0 * k)).epsilon(1e-6));

    auto kr = kappa_ratio(sol, ctx.eq, ctx.G, 1);
    CHECK(std::abs(kr.lhs - Complex(std::sqrt(0.5), 0)) < 1e-12);
    CHECK(std::abs(kr.rhs - Complex(std::sqrt(0.5), 0)) < 1e-12);
    CHECK(kr.rel_dev < 1e-11);
  }
}

TEST_CASE("m=1 forms and rate checks match the classical oracles at n=16") {
  Context ctx = make_context(1, RaySpec::create({1.0}));
  HpSolution sol = hp_solve(ctx.sys, MultiIndex::create({16}));
  extract_Q(sol, ctx.sys);
  compute_normalization(sol, ctx.sys);
  for (Complex z : {Complex(2.0, 0.0), Complex(-1.5, 0.8), Complex(0.0, 2.0)}) {
    auto fc = forms_asymptotic_check(sol, ctx.eq, ctx.G, ctx.sys, 0, z);
    // classical second-kind asymptotics: deviation well below 0.05 at n=16
    CHECK(fc.rel_dev < 0.05);
    // rhs branch: positive real for z > b
    if (z.imag() == 0.0 && z.real() > 1.0) CHECK(fc.rhs.real() > 0.0);
    auto rc = rate_of_convergence_check(sol, ctx.eq, ctx.G, ctx.sys, ctx.rev, 0, z);
    CHECK(rc.rel_dev < 0.05);
  }
}

TEST_CASE("approximation error equals the direct difference at small degree") {
  Context ctx = make_context(2, RaySpec::create({0.5, 0.5}));
  HpSolution sol = hp_solve(ctx.sys, MultiIndex::create({2, 2}));
  extract_Q(sol, ctx.sys);
  compute_normalization(sol, ctx.sys);
  for (Complex z : {Complex(1.4, 0.3), Complex(-2.5, 0.0), Complex(0.1, 1.2)}) {
    for (int j = 0; j < 2; ++j) {
      Complex stable = approximation_error(sol, ctx.sys, ctx.rev, j, z);
      Complex direct = sol.a(j)(z) / sol.a(2)(z) -
                       NikishinSystem::shat_descending(ctx.rev, 2, j + 1, z);
      CHECK(std::abs(stable - direct) <= 1e-6 * (std::abs(direct) + 1e-10));
    }
  }
}

TEST_CASE("m=2 deviations decrease along the straight ray") {
  Context ctx = make_context(2, RaySpec::create({0.5, 0.5}));
  std::vector<Complex> pts = {Complex(1.45, 0.0), Complex(0.0, 2.5), Complex(-3.0, 1.0)};
  std::vector<std::vector<Real>> t1dev(pts.size()), mldev(pts.size()), fdev(pts.size());
  std::vector<Real> kdev;
  for (int k : {2, 4, 6, 8, 10}) {
    MultiIndex n = MultiIndex::create({k / 2, k / 2});
    HpSolution sol = hp_solve(ctx.sys, n);
    extract_Q(sol, ctx.sys);
    compute_normalization(sol, ctx.sys);
    for (size_t p = 0; p < pts.size(); ++p) {
      t1dev[p].push_back(zero_poly_ratio(sol, ctx.eq, ctx.G, 1, pts[p]).rel_dev);
      mldev[p].push_back(ml_poly_ratio(sol, ctx.eq, ctx.G, ctx.rev, 0, pts[p]).rel_dev);
      fdev[p].push_back(forms_asymptotic_check(sol, ctx.eq, ctx.G, ctx.sys, 0, pts[p]).rel_dev);
    }
    kdev.push_back(kappa_ratio(sol, ctx.eq, ctx.G, 1).rel_dev);
  }
  for (size_t p = 0; p < pts.size(); ++p) {
    CHECK(assess_trend(t1dev[p]).eventually_decreasing);
    CHECK(assess_trend(mldev[p]).eventually_decreasing);
    CHECK(assess_trend(fdev[p]).eventually_decreasing);
    CHECK(t1dev[p].back() < 0.05);
  }
  CHECK(assess_trend(kdev).eventually_decreasing);
  // conjugate points give equal deviations
  MultiIndex n = MultiIndex::create({3, 3});
  HpSolution sol = hp_solve(ctx.sys, n);
  extract_Q(sol, ctx.sys);
  compute_normalization(sol, ctx.sys);
  Complex z(0.5, 1.5);
  Real d1 = zero_poly_ratio(sol, ctx.eq, ctx.G, 1, z).rel_dev;
  Real d2 = zero_poly_ratio(sol, ctx.eq, ctx.G, 1, std::conj(z)).rel_dev;
  CHECK(d1 == doctest::Approx(d2).epsilon(1e-12));
}

TEST_CASE("rhs values are independent of the polynomial pipeline") {
  Context ctx = make_context(2, RaySpec::create({0.5, 0.5}));
  HpSolution s1 = hp_solve(ctx.sys, MultiIndex::create({2, 2}));
  HpSolution s2 = hp_solve(ctx.sys, MultiIndex::create({4, 4}));
  for (auto* s : {&s1, &s2}) {
    extract_Q(*s, ctx.sys);
    compute_normalization(*s, ctx.sys);
  }
  Complex z(1.5, 0.7);
  CHECK(zero_poly_ratio(s1, ctx.eq, ctx.G, 1, z).rhs == zero_poly_ratio(s2, ctx.eq, ctx.G, 1, z).rhs);
  CHECK(kappa_ratio(s1, ctx.eq, ctx.G, 2).rhs == kappa_ratio(s2, ctx.eq, ctx.G, 2).rhs);
}

TEST_CASE("rate check boundary index convention (j+1 = m) against rate1") {
  // for j = m-1 the error is A_{m-1}/Q_m exactly; the record's rhs carries
  // the empty-chain factor 1
  Context ctx = make_context(2, RaySpec::create({0.5, 0.5}));
  HpSolution sol = hp_solve(ctx.sys, MultiIndex::create({3, 3}));
  extract_Q(sol, ctx.sys);
  compute_normalization(sol, ctx.sys);
  Complex z(1.5, 0.4);
  Complex err = approximation_error(sol, ctx.sys, ctx.rev, 1, z);
  Complex viaform = -form_eval(sol, ctx.sys, 1, z) / sol.Q(2)(z);
  CHECK(std::abs(err - viaform) <= 1e-10 * std::abs(viaform));
}

TEST_CASE("cauchy kernel values and brute-force cross-check") {
  NikishinSystem pair = arcsine_chain(2);
  CHECK(cauchy_kernel(pair, 0.0, 2.5) == doctest::Approx(-0.4).epsilon(1e-14));

  // m=3 with a Lebesgue-type middle measure so the Riemann oracle converges
  std::vector<MeasureSpec> gens;
  gens.push_back(MeasureSpec::arcsine(Interval(-1, 1)));
  gens.push_back(
      MeasureSpec(Interval(2, 3), 0.0, 0.0, ChebSeries::constant(Interval(2, 3), 1.0), true));
  gens.push_back(MeasureSpec::arcsine(Interval(4, 5)));
  NikishinSystem triple(std::move(gens), 160);
  Real x1 = 0.3, x3 = 4.6;
  Real quadv = cauchy_kernel(triple, x1, x3);
  // brute-force midpoint Riemann sum of int d sigma_2(t)/((t-x3)(x1-t))
  long N = 200000;
  Real h = 1.0 / N, acc = 0.0;
  for (long i = 0; i < N; ++i) {
    Real t = 2.0 + (i + 0.5) * h;
    acc += h / ((t - x3) * (x1 - t));
  }
  CHECK(quadv == doctest::Approx(acc).epsilon(1e-6));
  CHECK_THROWS_AS(cauchy_kernel(arcsine_chain(1), 0.0, 0.5), Error);
}

TEST_CASE("biorthogonal polynomials: basics and cross-checks") {
  NikishinSystem sys = arcsine_chain(2);
  BiorthogonalPair pair = biorthogonal_polys(sys, 8);
  // P_0 = Q_0 = 1
  CHECK(pair.P[0](0.5) == doctest::Approx(1.0));
  CHECK(pair.Q[0](2.5) == doctest::Approx(1.0));
  // biorthogonality residuals
  for (int n = 1; n <= 8; ++n) {
    Real Cn = std::abs(pair.C(n));
    CHECK(Cn > 0.0);
    for (int k = 0; k < n; ++k) {
      CHECK(std::abs(pair.pairing(k, n)) < 1e-9 * Cn);
      CHECK(std::abs(pair.pairing(n, k)) < 1e-9 * Cn);
    }
  }
  // Q_n coincides with a_{(n,0),m}; P_n with the reversed system's
  NikishinSystem rev = sys.reversed();
  for (int n : {2, 5, 8}) {
    HpSolution sol = hp_solve(sys, MultiIndex::create({n, 0}));
    CHECK(poly_vector_distance({pair.Q[n]}, {sol.fixed_point_Q_[1]}) < 1e-8);
    HpSolution rsol = hp_solve(rev, MultiIndex::create({n, 0}));
    CHECK(poly_vector_distance({pair.P[n]}, {rsol.fixed_point_Q_[1]}) < 1e-8);
  }
}

TEST_CASE("default test points and sweep plumbing") {
  NikishinSystem sys = arcsine_chain(2);
  auto pts = default_test_points(sys);
  CHECK(pts.size() == 12);
  for (Complex z : pts) {
    bool on = false;
    for (int j = 1; j <= 2; ++j)
      if (z.imag() == 0.0 && sys.interval(j).contains(z.real())) on = true;
    CHECK(!on);
  }

  // realizable / non-realizable rays
  RaySpec ray = RaySpec::create({0.5, 0.5});
  CHECK_THROWS_AS(convergence_sweep(sys, ray, {3}), Error);
  CHECK(convergence_sweep(sys, ray, {}).empty());

  SweepOptions opt;
  opt.grid_n = 96;
  opt.test_points = {Complex(0.0, 2.0), Complex(1.5, 0.0)};
  auto table = convergence_sweep(sys, ray, {2, 4}, opt);
  CHECK(!table.empty());
  // canonical ordering: nondecreasing by check name then |n|
  for (size_t i = 1; i < table.size(); ++i) {
    CHECK(table[i].check >= table[i - 1].check);
    if (table[i].check == table[i - 1].check)
      CHECK(table[i].index.total() >= table[i - 1].index.total());
  }
  // Corollary 3.3 regime: ray (1,0) gives indices (k,0)
  RaySpec cor = RaySpec::create({1.0, 0.0});
  auto t2 = convergence_sweep(sys, cor, {3}, opt);
  REQUIRE(!t2.empty());
  CHECK(t2.front().index.n == std::vector<int>{3, 0});
}

TEST_CASE("assess_trend semantics") {
  std::vector<Real> good = {1.0, 0.9, 0.5, 0.3, 0.2, 0.1};
  CHECK(assess_trend(good).eventually_decreasing);
  CHECK(assess_trend(good).final_dev == doctest::Approx(0.1));
  std::vector<Real> wobbly = {1.0, 0.5, 0.52, 0.3, 0.31, 0.2};  // within 10%
  CHECK(assess_trend(wobbly).eventually_decreasing);
  std::vector<Real> bad = {1.0, 0.5, 0.2, 0.5, 0.6, 0.9};
  CHECK(!assess_trend(bad).eventually_decreasing);
}
