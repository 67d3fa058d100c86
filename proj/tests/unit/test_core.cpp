#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "lwf/combinatorics.hpp"
#include "lwf/lambda_measure.hpp"
#include "lwf/offspring_law.hpp"
#include "lwf/quadrature.hpp"
#include "lwf/rng.hpp"
#include "lwf/schedule.hpp"
#include "lwf/simplex.hpp"

using namespace lwf;

namespace {

// Composite Simpson on [a, b]; only used on smooth integrands.
template <class F>
double simpson(F f, double a, double b, int n = 200000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

double beta_fn(double a, double b) { return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b)); }

}  // namespace

TEST_CASE("rng streams are reproducible and distinct") {
  RngStream a(42, 3), b(42, 3), c(42, 4), d(43, 3);
  bool same = true, differs_stream = false, differs_seed = false;
  for (int i = 0; i < 1'000'000; ++i) {
    const auto x = a(), y = b(), z = c(), w = d();
    same = same && x == y;
    differs_stream = differs_stream || x != z;
    differs_seed = differs_seed || x != w;
  }
  CHECK(same);
  CHECK(differs_stream);
  CHECK(differs_seed);
  CHECK(derive_seed(1, "a") != derive_seed(1, "b"));
  CHECK(derive_seed(1, "a") == derive_seed(1, "a"));
  CHECK(derive_seed(1, "a") != derive_seed(2, "a"));
}

TEST_CASE("rng discard skips whole blocks") {
  RngStream a(9, 1), b(9, 1);
  for (int i = 0; i < 10; ++i) a();
  b.discard(5);
  CHECK(a() == b());
}

TEST_CASE("rng distributions have the right moments") {
  RngStream rng(7, 0);
  const int n = 200000;
  double su = 0, sn = 0, sn2 = 0, se = 0, sp = 0, sb = 0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    su += u;
    const double g = rng.normal();
    sn += g;
    sn2 += g * g;
    se += rng.exponential(2.0);
    sp += static_cast<double>(rng.poisson(3.5));
    sb += static_cast<double>(rng.binomial(50, 0.3));
  }
  CHECK(su / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(std::abs(sn / n) < 4.0 / std::sqrt(n));
  CHECK(sn2 / n == doctest::Approx(1.0).epsilon(0.02));
  CHECK(se / n == doctest::Approx(0.5).epsilon(0.02));
  CHECK(sp / n == doctest::Approx(3.5).epsilon(0.01));
  CHECK(sb / n == doctest::Approx(15.0).epsilon(0.01));
  CHECK(rng.binomial(10, 0.0) == 0);
  CHECK(rng.binomial(10, 1.0) == 10);
  CHECK(rng.poisson(0.0) == 0);
}

TEST_CASE("categorical draws follow the weights") {
  RngStream rng(1, 2);
  const std::vector<double> w{1.0, 0.0, 3.0};
  std::vector<int> hits(3, 0);
  for (int i = 0; i < 40000; ++i) ++hits[rng.categorical(w)];
  CHECK(hits[1] == 0);
  CHECK(hits[2] / 40000.0 == doctest::Approx(0.75).epsilon(0.02));
}

TEST_CASE("simplex points validate their coordinates") {
  CHECK_THROWS_AS(SimplexPoint({0.5, 0.6}), std::invalid_argument);
  CHECK_THROWS_AS(SimplexPoint({1.0}), std::invalid_argument);
  CHECK_THROWS_AS(SimplexPoint({-0.1, 1.1}), std::invalid_argument);
  const SimplexPoint v = SimplexPoint::vertex(3, 1);
  CHECK(v.fixed_allele() == std::optional<std::size_t>(1));
  CHECK(v.support_size() == 1);
  CHECK_FALSE(SimplexPoint::uniform(4).fixed_allele().has_value());
  const auto p = SimplexPoint::project({-0.2, 0.5, 1.5});
  CHECK(p[0] == 0.0);
  CHECK(p[1] == doctest::Approx(0.25));
  CHECK(p[2] == doctest::Approx(0.75));
  std::vector<double> raw{0.3, -1e-9, 0.7};
  CHECK(project_to_simplex(raw));
  CHECK(raw[1] == 0.0);
}

TEST_CASE("sample_simplex respects the floor") {
  RngStream rng(5, 0);
  for (int i = 0; i < 1000; ++i) {
    const auto x = sample_simplex(4, rng, 0.05);
    for (double v : x.values()) CHECK(v >= 0.05);
  }
}

TEST_CASE("adaptive quadrature") {
  const auto r = integrate_adaptive([](double x) { return std::sin(x); }, 0.0, std::numbers::pi);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-12));
  // Endpoint singularities handled by the change of variables.
  const double s = integrate_unit_interval([](double y, double) { return 1.0 / std::sqrt(y); }, 0.0, 1.0, -0.5, 0.0);
  CHECK(s == doctest::Approx(2.0).epsilon(1e-10));
  const double t = integrate_unit_interval([](double, double ym) { return std::pow(ym, -0.7); }, 0.0, 1.0, 0.0, -0.7);
  CHECK(t == doctest::Approx(1.0 / 0.3).epsilon(1e-9));
}

TEST_CASE("lambda total mass") {
  CHECK(lambda_total_mass(LambdaMeasure::zero()) == 0.0);
  CHECK(lambda_total_mass(LambdaMeasure::point_mass(0.5, 2.0)) == 2.0);
  CHECK(lambda_total_mass(LambdaMeasure::atoms({{0.2, 0.3}, {0.9, 0.7}})) == doctest::Approx(1.0));
  CHECK(lambda_total_mass(LambdaMeasure::beta(2.0, 3.0, 1.5)) == doctest::Approx(1.5));
  CHECK_THROWS(LambdaMeasure::point_mass(0.0, 1.0));
  CHECK_THROWS(LambdaMeasure::beta(-1.0, 1.0, 1.0));
}

TEST_CASE("lambda_nk examples") {
  const auto one = LambdaMeasure::point_mass(1.0, 1.0);
  CHECK(lambda_nk(one, 3, 3) == 1.0);
  CHECK(lambda_nk(one, 3, 2) == 0.0);
  CHECK(lambda_nk(LambdaMeasure::uniform(1.0), 4, 2) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(lambda_nk(LambdaMeasure::zero(), 5, 3) == 0.0);
}

TEST_CASE("lambda_nk closed forms match independent formulas") {
  // Beta moments through the Beta function, atoms by direct summation.
  for (auto [a, b, m] : {std::tuple{0.5, 0.5, 1.0}, {2.0, 3.0, 2.0}, {1.5, 0.7, 0.4}, {1.0, 1.0, 3.0}}) {
    const auto L = a == 1.0 && b == 1.0 ? LambdaMeasure::uniform(m) : LambdaMeasure::beta(a, b, m);
    for (long n = 2; n <= 20; ++n)
      for (long k = 2; k <= n; ++k) {
        const double want = m * beta_fn(a + k - 2, b + n - k) / beta_fn(a, b);
        CHECK(lambda_nk(L, n, k) == doctest::Approx(want).epsilon(1e-10));
      }
  }
  const auto atoms = LambdaMeasure::atoms({{0.2, 0.3}, {0.9, 0.7}});
  for (long n = 2; n <= 20; ++n)
    for (long k = 2; k <= n; ++k) {
      const double want = 0.3 * std::pow(0.2, k - 2) * std::pow(0.8, n - k) + 0.7 * std::pow(0.9, k - 2) * std::pow(0.1, n - k);
      CHECK(lambda_nk(atoms, n, k) == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("lambda_nk is nonincreasing in n") {
  for (const auto& L : {LambdaMeasure::beta(0.5, 0.5, 1.0), LambdaMeasure::uniform(1.0),
                        LambdaMeasure::point_mass(0.3, 1.0), LambdaMeasure::atoms({{0.5, 1.0}, {1.0, 0.5}})})
    for (long n = 2; n < 20; ++n)
      for (long k = 2; k <= n; ++k) CHECK(lambda_nk(L, n, k) >= lambda_nk(L, n + 1, k) - 1e-15);
}

TEST_CASE("collision rate is binomial times lambda_nk") {
  const auto L = LambdaMeasure::beta(2.0, 3.0, 1.0);
  CHECK(collision_rate(L, 10, 4) == doctest::Approx(210.0 * lambda_nk(L, 10, 4)).epsilon(1e-12));
}

TEST_CASE("kappa_star") {
  CHECK(kappa_star(LambdaMeasure::point_mass(0.5, 1.0), 1.0) == doctest::Approx(4.0 * std::log(2.0)).epsilon(1e-14));
  CHECK(kappa_star(LambdaMeasure::zero(), 1.0) == 0.0);
  CHECK(std::isinf(kappa_star(LambdaMeasure::point_mass(1.0, 1.0), 1.0)));
  CHECK(std::isinf(kappa_star(LambdaMeasure::uniform(1.0), 1.0)));
  CHECK(std::isinf(kappa_star(LambdaMeasure::beta(0.5, 2.0, 1.0), 1.0)));
  CHECK_THROWS(kappa_star(LambdaMeasure::zero(), 0.0));
  // Beta(2, 3): integrand -log(1-y) (1-y)^2 / (y B(2,3)) is smooth on (0, 1].
  const double want = simpson(
      [](double y) { return y == 0.0 ? 1.0 / beta_fn(2, 3) : -std::log1p(-y) * (1 - y) * (1 - y) / (y * beta_fn(2, 3)); },
      0.0, 1.0 - 1e-12);
  CHECK(kappa_star(LambdaMeasure::beta(2.0, 3.0, 1.0), 2.0) == doctest::Approx(want / 2.0).epsilon(1e-6));
  CHECK(kappa_star_as_printed(LambdaMeasure::point_mass(0.5, 1.0), 1.0) < 0.0);
}

TEST_CASE("truncated jump law") {
  RngStream rng(3, 0);
  const TruncatedJumpLaw pm(LambdaMeasure::point_mass(0.4, 2.0), 0.1);
  CHECK(pm.rate() == doctest::Approx(2.0 / 0.16));
  CHECK(pm.sample(rng) == 0.4);
  const TruncatedJumpLaw below(LambdaMeasure::point_mass(0.05, 1.0), 0.1);
  CHECK(below.rate() == 0.0);
  CHECK(below.excluded_mass() == doctest::Approx(1.0));
  // Uniform: density 1/z^2 on [c, 1], mean ln(1/c) / (1/c - 1).
  const double c = 0.1;
  const TruncatedJumpLaw u(LambdaMeasure::uniform(1.0), c);
  CHECK(u.rate() == doctest::Approx(1.0 / c - 1.0).epsilon(1e-10));
  CHECK(u.excluded_mass() == doctest::Approx(c).epsilon(1e-10));
  double s = 0.0, s2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = u.sample(rng);
    REQUIRE(z >= c);
    REQUIRE(z <= 1.0);
    s += z;
    s2 += z * z;
  }
  const double mean = std::log(1.0 / c) / (1.0 / c - 1.0);
  const double var = (1.0 - c) / (1.0 / c - 1.0) - mean * mean;
  CHECK(std::abs(s / n - mean) < 4.0 * std::sqrt(var / n));
}

TEST_CASE("truncated jump law for a Beta density") {
  // Beta(2.5, 1.5): z has density proportional to z^(a-3) (1-z)^(b-1) on [c, 1].
  const double a = 2.5, b = 1.5, c = 0.05;
  const TruncatedJumpLaw law(LambdaMeasure::beta(a, b, 1.0), c);
  auto dens = [&](double z) { return std::pow(z, a - 3.0) * std::pow(1.0 - z, b - 1.0); };
  const double norm = simpson(dens, c, 1.0);
  const double mean = simpson([&](double z) { return z * dens(z); }, c, 1.0) / norm;
  const double second = simpson([&](double z) { return z * z * dens(z); }, c, 1.0) / norm;
  RngStream rng(8, 1);
  const int n = 200000;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += law.sample(rng);
  CHECK(std::abs(s / n - mean) < 4.0 * std::sqrt((second - mean * mean) / n));
}

TEST_CASE("offspring law") {
  const auto Q = OffspringLaw::from_tail(0.2, {{2, 0.5}, {4, 0.5}});
  CHECK(Q.prob(1) == doctest::Approx(0.8));
  CHECK(Q.prob(2) == doctest::Approx(0.1));
  CHECK(Q.prob(3) == 0.0);
  CHECK(Q.max_size() == 4);
  CHECK(Q.beta() == doctest::Approx(2.0));
  CHECK_THROWS(make_tail({{1, 1.0}}));
  CHECK_THROWS(OffspringLaw(0.1, make_tail({{2, 0.4}})));
  RngStream rng(4, 4);
  int ones = 0;
  for (int i = 0; i < 50000; ++i) ones += Q.sample(rng) == 1;
  CHECK(ones / 50000.0 == doctest::Approx(0.8).epsilon(0.01));
  CHECK(OffspringLaw::singleton().sample(rng) == 1);
}

TEST_CASE("schedule examples") {
  const auto s0 = make_schedule(10000, 0.25, 1.0, 1.0, LambdaMeasure::zero(), make_tail({{2, 1.0}}));
  CHECK(s0.gamma() == 0.0);
  CHECK(s0.rho() == doctest::Approx(1e-4));
  const auto s1 = make_schedule(10000, 0.25, 1.0, 1.0, LambdaMeasure::point_mass(0.5, 1.0), make_tail({{2, 1.0}}));
  CHECK(s1.rho() == doctest::Approx(1e-4));
  CHECK(s1.lambda_alpha_mass() == doctest::Approx(4.0));
  CHECK(s1.gamma() == doctest::Approx(4e-4));
  const auto s2 = make_schedule(100, 0.25, 1.0, 0.0, LambdaMeasure::zero(), make_tail({{2, 1.0}}), 0.75);
  CHECK(s2.rho() == doctest::Approx(std::pow(100.0, -0.75)));
  // b-rule: N rho -> infinity and rho N^(2 alpha) -> 0 with the default b.
  double prev_nr = 0.0, prev_r2a = 1e300;
  for (long N : {100L, 10000L, 1000000L}) {
    const auto s = make_schedule(N, 0.25, 1.0, 0.0, LambdaMeasure::zero(), make_tail({{2, 1.0}}));
    const double nr = N * s.rho(), r2a = s.rho() * std::sqrt(static_cast<double>(N));
    CHECK(nr > prev_nr);
    CHECK(r2a < prev_r2a);
    prev_nr = nr;
    prev_r2a = r2a;
  }
}

TEST_CASE("truncated mass grows with N") {
  double prev = 0.0;
  for (long N : {10L, 100L, 1000L, 10000L}) {
    const auto s = make_schedule(N, 0.25, 1.0, 1.0, LambdaMeasure::uniform(1.0), make_tail({{2, 1.0}}));
    CHECK(s.lambda_alpha_mass() >= prev);
    CHECK(s.lambda_alpha_mass() == doctest::Approx(std::pow(N, 0.25) - 1.0).epsilon(1e-9));
    prev = s.lambda_alpha_mass();
  }
}

TEST_CASE("infeasible schedules are rejected") {
  CHECK_THROWS_AS(make_schedule(10, 0.25, 1.0, 1.0, LambdaMeasure::point_mass(0.9, 100.0), make_tail({{2, 1.0}})),
                  InfeasibleSchedule);
  CHECK_THROWS(make_schedule(100, 0.6, 1.0, 1.0, LambdaMeasure::zero(), make_tail({{2, 1.0}})));
}

TEST_CASE("compositions") {
  CHECK(composition_count(3, 2) == 6);
  CHECK(composition_count(4, 3) == 20);
  std::size_t seen = 0;
  std::set<std::vector<int>> all;
  for_each_composition(3, 4, [&](const std::vector<int>& z) {
    CHECK(composition_rank(z) == seen);
    CHECK(z[0] + z[1] + z[2] == 4);
    all.insert(z);
    ++seen;
  });
  CHECK(seen == composition_count(3, 4));
  CHECK(all.size() == seen);
  const std::vector<int> z{2, 1, 3};
  CHECK(multinomial_coefficient(z) == doctest::Approx(60.0));
}
