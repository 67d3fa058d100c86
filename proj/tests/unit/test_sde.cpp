#include <doctest.h>

#include <cmath>

#include "lwf/replicate.hpp"
#include "lwf/sde.hpp"
#include "lwf/stats.hpp"

using namespace lwf;

namespace {

SdeIntegrator integrator(DriftFunction mu, double sigma, LambdaMeasure L = LambdaMeasure::zero(), double dt = 1e-3,
                         double horizon = 1.0, double tol_ext = 0.0) {
  return SdeIntegrator(SdeConfig{std::move(mu), sigma, std::move(L), 1e-3, dt, horizon, tol_ext});
}

double max_cov_error(const std::vector<double>& x) {
  const std::size_t K = x.size();
  std::vector<double> z(K * K);
  zeta(x, z);
  double worst = 0.0;
  for (std::size_t i = 0; i < K; ++i)
    for (std::size_t j = 0; j < K; ++j) {
      double s = 0.0;
      for (std::size_t l = 0; l < K; ++l) s += z[i * K + l] * z[j * K + l];
      worst = std::max(worst, std::abs(s - x[i] * ((i == j ? 1.0 : 0.0) - x[j])));
    }
  return worst;
}

}  // namespace

TEST_CASE("zeta examples") {
  const auto z = zeta(SimplexPoint({0.5, 0.5}));
  CHECK(z[0] == doctest::Approx(0.5));
  CHECK(z[1] == 0.0);
  CHECK(z[2] == doctest::Approx(-0.5));
  CHECK(z[3] == 0.0);
  for (double v : zeta(SimplexPoint::vertex(3, 0))) CHECK(v == 0.0);
  for (double v : zeta(SimplexPoint::vertex(4, 3))) CHECK(v == 0.0);
}

TEST_CASE("zeta factors the Wright-Fisher covariance") {
  RngStream rng(1, 0);
  for (std::size_t K = 2; K <= 6; ++K)
    for (int t = 0; t < 2000; ++t) {
      auto x = sample_simplex(K, rng).vector();
      if (t % 4 == 0) {
        // Push one coordinate to 1e-8 to exercise near-boundary denominators.
        const std::size_t i = static_cast<std::size_t>(t) % K;
        const double excess = x[i] - 1e-8;
        x[i] = 1e-8;
        x[(i + 1) % K] += excess;
      }
      CHECK(max_cov_error(x) <= 1e-8);
    }
}

TEST_CASE("frozen dynamics leave the state untouched") {
  const auto sde = integrator(DriftFunction::neutral(3), 0.0);
  RngStream rng(2, 0);
  const SimplexPoint x({0.2, 0.3, 0.5});
  CHECK(step_em(sde, x, rng) == x);
}

TEST_CASE("jumps are convex combinations") {
  std::vector<double> x{0.2, 0.3, 0.5};
  apply_jump(x, 0.25, 1);
  CHECK(x[0] == doctest::Approx(0.15));
  CHECK(x[1] == doctest::Approx(0.475));
  CHECK(x[2] == doctest::Approx(0.375));
  CHECK(x[0] + x[1] + x[2] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("vertices stay put under mutation-free drifts") {
  const auto sde = integrator(DriftFunction(3, drifts::Rps{1.0}), 1.0, LambdaMeasure::point_mass(0.5, 1.0));
  RngStream rng(3, 0);
  const auto v = SimplexPoint::vertex(3, 2);
  const auto run = simulate_sde(sde, v, {10, false}, rng);
  for (const auto& s : run.trajectory.states) CHECK(s == v);
}

TEST_CASE("trajectories stay on the simplex") {
  const auto sde = integrator(DriftFunction(3, drifts::Rps{2.0}), 1.0, LambdaMeasure::beta(2.5, 1.5, 1.0), 1e-3, 3.0);
  RngStream rng(4, 0);
  const auto run = simulate_sde(sde, SimplexPoint({0.2, 0.3, 0.5}), {1, false}, rng);
  for (const auto& s : run.trajectory.states) {
    double sum = 0.0;
    for (double v : s.values()) {
      CHECK(v >= 0.0);
      sum += v;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("rock-paper-scissors is equivariant under cyclic relabelling") {
  const auto sde = integrator(DriftFunction(3, drifts::Rps{1.0}), 0.0, LambdaMeasure::zero(), 1e-3, 2.0);
  RngStream r1(5, 0), r2(5, 0);
  const auto a = simulate_sde(sde, SimplexPoint({0.5, 0.25, 0.25}), {50, false}, r1);
  const auto b = simulate_sde(sde, SimplexPoint({0.25, 0.5, 0.25}), {50, false}, r2);
  REQUIRE(a.trajectory.size() == b.trajectory.size());
  for (std::size_t k = 0; k < a.trajectory.size(); ++k)
    for (std::size_t i = 0; i < 3; ++i)
      CHECK(b.trajectory.states[k][(i + 1) % 3] == doctest::Approx(a.trajectory.states[k][i]).epsilon(1e-12));
}

TEST_CASE("neutral coordinates are martingales") {
  const auto sde = integrator(DriftFunction::neutral(3), 1.0, LambdaMeasure::point_mass(0.4, 1.0), 1e-3, 1.0);
  const SimplexPoint x0({0.2, 0.3, 0.5});
  const std::vector<double> times{0.25, 0.5, 1.0};
  const auto runs = run_replicates(4000, [&](std::size_t i) {
    RngStream rng(6, i);
    return sde_states_at(sde, x0, times, rng);
  });
  for (std::size_t k = 0; k < times.size(); ++k)
    for (std::size_t i = 0; i < 3; ++i) {
      std::vector<double> v;
      for (const auto& r : runs) v.push_back(r[k][i]);
      const auto ms = stats::mean_se(v);
      CHECK(std::abs(ms.mean - x0[i]) <= 4.0 * ms.std_error);
    }
}

TEST_CASE("one step matches the generator on x_i and x_i x_j") {
  // A f = mu.grad f + (sigma + Lambda mass)/2 * sum_kl x_k(1{k=l} - x_l) d_kl f:
  // for atoms the jump part of the generator on quadratics equals that of a
  // Kingman term with rate Lambda([0,1]).
  const double sigma = 1.0, mass = 1.0, dt = 0.01;
  const auto L = LambdaMeasure::atoms({{0.3, 0.5}, {0.8, 0.5}});
  const DriftFunction mu(3, drifts::Rps{1.0});
  const auto sde = integrator(mu, sigma, L, dt, dt);
  RngStream prng(7, 0);
  for (int p = 0; p < 10; ++p) {
    const auto x = sample_simplex(3, prng, 0.1);
    const auto m = mu(x.values());
    const std::size_t R = 200000;
    const auto ends = run_replicates(R, [&](std::size_t r) {
      RngStream rng(8 + static_cast<std::uint64_t>(p), r);
      std::vector<double> y = x.vector();
      sde.step(y, dt, rng);
      return y;
    });
    for (std::size_t i = 0; i < 3; ++i) {
      std::vector<double> d1, d2;
      const std::size_t j = (i + 1) % 3;
      for (const auto& y : ends) {
        d1.push_back((y[i] - x[i]) / dt);
        d2.push_back((y[i] * y[j] - x[i] * x[j]) / dt);
      }
      const auto e1 = stats::mean_se(d1), e2 = stats::mean_se(d2);
      const double a1 = m[i];
      const double a2 = m[i] * x[j] + m[j] * x[i] - (sigma + mass) * x[i] * x[j];
      CHECK(std::abs(e1.mean - a1) <= 4.0 * e1.std_error + 2.0 * dt);
      CHECK(std::abs(e2.mean - a2) <= 4.0 * e2.std_error + 2.0 * dt);
    }
  }
}

TEST_CASE("fixation and extinction bookkeeping") {
  const auto sde = integrator(DriftFunction::neutral(3), 1.0, LambdaMeasure::zero(), 1e-3, 50.0);
  RngStream rng(9, 0);
  const auto run = simulate_sde(sde, SimplexPoint({0.2, 0.3, 0.5}), {0, true}, rng);
  REQUIRE(run.fixed_allele.has_value());
  CHECK(run.final_state == SimplexPoint::vertex(3, *run.fixed_allele));
  CHECK(run.fixation_time.value() == doctest::Approx(run.end_time));
  for (std::size_t i = 0; i < 3; ++i) {
    if (i == *run.fixed_allele) CHECK(std::isnan(run.extinction_times[i]));
    else CHECK(run.extinction_times[i] <= run.end_time);
  }
}

TEST_CASE("SDE replicates are independent of the thread count") {
  const auto sde = integrator(DriftFunction(3, drifts::Rps{1.0}), 0.5, LambdaMeasure::point_mass(0.3, 1.0), 1e-3, 0.5);
  const SimplexPoint x0({0.2, 0.3, 0.5});
  auto kernel = [&](std::size_t i) {
    RngStream rng(10, i);
    return simulate_sde(sde, x0, {25, false}, rng).trajectory.states;
  };
  CHECK(run_replicates_serial(48, kernel) == run_replicates(48, kernel, Execution{4}));
}

TEST_CASE("jump bookkeeping") {
  const auto sde = integrator(DriftFunction::neutral(2), 1.0, LambdaMeasure::uniform(1.0), 1e-3);
  CHECK(sde.jump_rate() == doctest::Approx(1.0 / 1e-3 - 1.0).epsilon(1e-9));
  CHECK(sde.dropped_jump_mass() == doctest::Approx(1e-3).epsilon(1e-9));
  CHECK(sde.coarse_jump_bins());
}
