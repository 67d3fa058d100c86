#include <doctest.h>

#include <cmath>
#include <numeric>

#include "lwf/ancestral.hpp"
#include "lwf/stats.hpp"

using namespace lwf;

namespace {

std::vector<double> tail_at(std::size_t k) {
  std::vector<double> t(k + 1, 0.0);
  t[k] = 1.0;
  return t;
}

// Stationary law of the generator restricted to {1..M}: transitions above M
// are dropped. Solves nu Q = 0 with sum nu = 1 by Gaussian elimination.
std::vector<double> truncated_stationary(const AncestralModel& m, long M) {
  const auto n = static_cast<std::size_t>(M);
  std::vector<std::vector<double>> A(n, std::vector<double>(n + 1, 0.0));
  // Row j of the system is column j of Q (equation (nu Q)_j = 0).
  for (long from = 1; from <= M; ++from)
    for (const auto& t : m.rates(from)) {
      if (t.target > M) continue;
      const auto i = static_cast<std::size_t>(from - 1), j = static_cast<std::size_t>(t.target - 1);
      A[j][i] += t.rate;
      A[i][i] -= t.rate;
    }
  // Replace the last equation by the normalisation.
  for (std::size_t i = 0; i < n; ++i) A[n - 1][i] = 1.0;
  A[n - 1][n] = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
    std::swap(A[c], A[piv]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || A[r][c] == 0.0) continue;
      const double f = A[r][c] / A[c][c];
      for (std::size_t k = c; k <= n; ++k) A[r][k] -= f * A[c][k];
    }
  }
  std::vector<double> nu(n);
  for (std::size_t i = 0; i < n; ++i) nu[i] = A[i][n] / A[i][i];
  return nu;
}

double absorption_time(const AncestralPath& p) {
  for (std::size_t i = 0; i < p.states.size(); ++i)
    if (p.states[i] == 1) return p.times[i];
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

TEST_CASE("transition rate examples") {
  const AncestralModel a(1.5, 1.0, tail_at(2), LambdaMeasure::zero());
  CHECK(a.rates(1) == std::vector<Transition>{{2, 1.5}});
  const AncestralModel b(1.5, 1.0, tail_at(3), LambdaMeasure::zero());
  CHECK(b.rates(1) == std::vector<Transition>{{3, 1.5}});
  const AncestralModel c(0.0, 1.0, tail_at(2), LambdaMeasure::zero());
  CHECK(c.rates(2) == std::vector<Transition>{{1, 1.0}});
  const AncestralModel d(0.0, 0.0, tail_at(2), LambdaMeasure::point_mass(1.0, 1.0));
  const auto r = d.rates(3);
  REQUIRE(r.size() == 1);
  CHECK(r[0].target == 1);
  CHECK(r[0].rate == doctest::Approx(1.0));
}

TEST_CASE("rates are merged, positive and sorted") {
  std::vector<double> tail(5, 0.0);
  tail[2] = 0.5;
  tail[4] = 0.5;
  const AncestralModel m(2.0, 1.0, tail, LambdaMeasure::beta(2.0, 3.0, 1.0));
  for (long n = 1; n <= 40; ++n) {
    const auto r = m.rates(n);
    double total = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      CHECK(r[i].rate > 0.0);
      CHECK(r[i].target != n);
      if (i > 0) CHECK(r[i - 1].target < r[i].target);
      total += r[i].rate;
    }
    CHECK(total == doctest::Approx(m.total_rate(n)));
    // Merger part: sum_k binom(n,k) lambda_{n,k} + sigma binom(n,2) collapses into
    // targets below n.
    double down = 0.0;
    for (const auto& t : r)
      if (t.target < n) down += t.rate;
    double want = n >= 2 ? 0.5 * n * (n - 1) : 0.0;
    for (long k = 2; k <= n; ++k) want += std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)) * lambda_nk(m.lambda(), n, k);
    CHECK(down == doctest::Approx(want).epsilon(1e-10));
  }
}

TEST_CASE("kappa star and recurrence") {
  const AncestralModel m(1.0, 0.0, tail_at(2), LambdaMeasure::point_mass(0.5, 1.0));
  CHECK(m.kappa_star() == doctest::Approx(4.0 * std::log(2.0)).epsilon(1e-8));
  CHECK(m.recurrent());
  CHECK_FALSE(AncestralModel(3.0, 0.0, tail_at(2), LambdaMeasure::point_mass(0.5, 1.0)).recurrent());
  CHECK(AncestralModel(3.0, 0.1, tail_at(2), LambdaMeasure::point_mass(0.5, 1.0)).recurrent());
  CHECK(AncestralModel(0.0, 0.0, tail_at(2), LambdaMeasure::zero()).recurrent());
  CHECK(std::isinf(AncestralModel(0.0, 0.0, {}, LambdaMeasure::zero()).kappa_star()));
}

TEST_CASE("Kingman absorption time") {
  // E[T] from 10 blocks = sum_{n=2}^{10} 1 / binom(n, 2) = 2 (1 - 1/10).
  const AncestralModel m(0.0, 1.0, tail_at(2), LambdaMeasure::zero());
  const auto paths = run_replicates(10000, [&](std::size_t i) {
    RngStream rng(1, i);
    return simulate_ancestral(m, 10, 1e4, rng);
  });
  std::vector<double> t;
  for (const auto& p : paths) {
    for (std::size_t i = 1; i < p.states.size(); ++i) CHECK(p.states[i] <= p.states[i - 1]);
    t.push_back(absorption_time(p));
  }
  const auto ms = stats::mean_se(t);
  CHECK(std::abs(ms.mean - 1.8) <= 4.0 * ms.std_error);
}

TEST_CASE("state lookups agree with recorded paths") {
  const AncestralModel m(1.0, 1.0, tail_at(3), LambdaMeasure::point_mass(0.5, 1.0));
  RngStream r1(2, 0), r2(2, 0);
  const auto p = simulate_ancestral(m, 3, 5.0, r1);
  CHECK(p.times.front() == 0.0);
  CHECK(p.states.front() == 3);
  CHECK(path_state_at(p, 5.0) == ancestral_state_at(m, 3, 5.0, r2));
}

TEST_CASE("without branching the stationary law is delta_1") {
  const AncestralModel m(0.0, 1.0, tail_at(2), LambdaMeasure::point_mass(0.5, 1.0));
  const auto nu = stationary_and_pgf(m, {}, 3);
  REQUIRE(nu.n_max() >= 1);
  CHECK(nu.occupation[0] == 1.0);
  for (double s : {0.0, 0.3, 0.7, 1.0}) CHECK(nu.pgf(s) == doctest::Approx(s));
  const SimplexPoint x0({0.2, 0.3, 0.5});
  const auto f = fixation_probabilities(m, x0, {}, 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(f.probs[i] == doctest::Approx(x0[i]));
}

TEST_CASE("birth-death stationary law is Poisson-like") {
  // n -> n+1 at kappa n, n -> n-1 at sigma n(n-1)/2: detailed balance gives
  // nu(n) proportional to a^(n-1) / n! with a = 2 kappa / sigma.
  const double kappa = 1.0, sigma = 1.0, a = 2.0 * kappa / sigma;
  const AncestralModel m(kappa, sigma, tail_at(2), LambdaMeasure::zero());
  StationaryOptions opts;
  opts.chains = 16;
  opts.time_per_chain = 4000.0;
  const auto nu = stationary_and_pgf(m, opts, 4, Execution{0});
  double z = 0.0;
  for (int n = 1; n <= 40; ++n) z += std::pow(a, n - 1) / std::tgamma(n + 1.0);
  for (long n = 1; n <= std::min<long>(6, nu.n_max()); ++n) {
    const double want = std::pow(a, static_cast<double>(n - 1)) / std::tgamma(static_cast<double>(n) + 1.0) / z;
    const auto i = static_cast<std::size_t>(n - 1);
    CHECK(std::abs(nu.occupation[i] - want) <= 4.0 * nu.std_error[i] + 1e-3);
  }
}

TEST_CASE("stationary estimate matches a truncated linear solve") {
  std::vector<double> tail(4, 0.0);
  tail[2] = 0.6;
  tail[3] = 0.4;
  const AncestralModel m(1.0, 0.5, tail, LambdaMeasure::point_mass(0.5, 1.0));
  const auto exact = truncated_stationary(m, 60);
  CHECK(std::accumulate(exact.begin(), exact.end(), 0.0) == doctest::Approx(1.0));
  StationaryOptions opts;
  opts.time_per_chain = 4000.0;
  const auto nu = stationary_and_pgf(m, opts, 5, Execution{0});
  for (std::size_t i = 0; i < 8 && i < nu.occupation.size(); ++i)
    CHECK(std::abs(nu.occupation[i] - exact[i]) <= 4.0 * nu.std_error[i] + 1e-3);
  double sum = std::accumulate(nu.occupation.begin(), nu.occupation.end(), 0.0);
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(nu.pgf(1.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(nu.pgf(0.0) == 0.0);
  double pgf_half = 0.0;
  for (std::size_t i = 0; i < exact.size(); ++i) pgf_half += exact[i] * std::pow(0.5, static_cast<double>(i + 1));
  CHECK(std::abs(nu.pgf(0.5) - pgf_half) <= 4.0 * nu.pgf_std_error(0.5) + 1e-3);
}

TEST_CASE("fixation probabilities from the pgf") {
  const AncestralModel m(1.0, 1.0, tail_at(2), LambdaMeasure::point_mass(0.5, 1.0));
  const auto f = fixation_probabilities(m, SimplexPoint({0.2, 0.3, 0.5}), {}, 6);
  CHECK(f.recurrent);
  double s = 0.0;
  for (double p : f.probs) {
    CHECK(p >= 0.0);
    s += p;
  }
  CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  // Selection favours higher labels.
  CHECK(f.probs[2] > 0.5);
}

TEST_CASE("transient regime fixes the highest present label") {
  const AncestralModel m(5.0, 0.0, tail_at(2), LambdaMeasure::point_mass(0.5, 1.0));
  CHECK_FALSE(m.recurrent());
  const auto f = fixation_probabilities(m, SimplexPoint({0.9, 0.1, 0.0}), {}, 7);
  CHECK_FALSE(f.recurrent);
  CHECK(f.probs == std::vector<double>{0.0, 1.0, 0.0});
  CHECK_THROWS_AS(stationary_and_pgf(m, {}, 7), TransienceDetected);
}

TEST_CASE("dual model construction") {
  const auto m = ancestral_model_for(DriftFunction(3, drifts::Transitive{2.0, {0.0, 0.25, 0.75}}), 0.5,
                                     LambdaMeasure::zero());
  CHECK(m.kappa() == 2.0);
  CHECK(m.sigma() == 0.5);
  REQUIRE(m.tail().size() >= 4);
  CHECK(m.tail()[2] == 0.25);
  CHECK(m.tail()[3] == 0.75);
  CHECK(ancestral_model_for(DriftFunction::neutral(2), 1.0, LambdaMeasure::zero()).kappa() == 0.0);
  CHECK_THROWS(ancestral_model_for(DriftFunction(3, drifts::Rps{1.0}), 1.0, LambdaMeasure::zero()));
}

TEST_CASE("ancestral model validates its tail") {
  CHECK_THROWS(AncestralModel(1.0, 1.0, {0.0, 0.5, 0.5}, LambdaMeasure::zero()));
  CHECK_THROWS(AncestralModel(1.0, 1.0, {0.0, 0.0, -1.0}, LambdaMeasure::zero()));
}
