#include "lwf/sde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lwf {

namespace {
constexpr double kDegenerate = 1e-14;
}

void zeta(std::span<const double> x, std::span<double> out) {
  const std::size_t K = x.size();
  if (out.size() != K * K) throw std::invalid_argument("zeta output must have K*K entries");
  // tail[j] = x_{j+1} + ... + x_K = 1 - (x_1 + ... + x_j), summed from the
  // top so it stays accurate near the boundary.
  thread_local std::vector<double> tail;
  tail.assign(K + 1, 0.0);
  for (std::size_t j = K; j-- > 0;) tail[j] = tail[j + 1] + x[j];
  for (std::size_t i = 0; i < K; ++i) {
    for (std::size_t j = 0; j < K; ++j) {
      double v = 0.0;
      if (j == i) {
        const double den = tail[i];
        if (den > kDegenerate) v = std::sqrt(std::max(x[i] * tail[i + 1] / den, 0.0));
      } else if (j < i) {
        const double den = tail[j] * tail[j + 1];
        if (tail[j] > kDegenerate && tail[j + 1] > kDegenerate) v = -x[i] * std::sqrt(std::max(x[j], 0.0) / den);
      }
      out[i * K + j] = v;
    }
  }
}

std::vector<double> zeta(const SimplexPoint& x) {
  std::vector<double> out(x.size() * x.size());
  zeta(x.values(), out);
  return out;
}

void apply_jump(std::span<double> x, double z, std::size_t i) noexcept {
  for (auto& v : x) v *= 1.0 - z;
  x[i] += z;
}

SdeIntegrator::SdeIntegrator(SdeConfig cfg) : cfg_(std::move(cfg)) {
  if (!(cfg_.sigma >= 0.0)) throw std::invalid_argument("sigma must be nonnegative");
  if (!(cfg_.dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(cfg_.horizon >= 0.0)) throw std::invalid_argument("horizon must be nonnegative");
  if (!(cfg_.tol_ext >= 0.0 && cfg_.tol_ext < 1.0)) throw std::invalid_argument("tol_ext must be in [0, 1)");
  if (!(cfg_.eps_jump > 0.0 && cfg_.eps_jump < 1.0)) throw std::invalid_argument("eps_jump must be in (0, 1)");
  jumps_ = TruncatedJumpLaw(cfg_.lambda, cfg_.eps_jump);
  steps_ = static_cast<long>(std::ceil(cfg_.horizon / cfg_.dt - 1e-9));
}

void SdeIntegrator::diffuse(std::span<double> x, double h, RngStream& rng) const {
  const std::size_t K = x.size();
  // Per-thread scratch keeps the inner loop allocation-free.
  thread_local std::vector<double> dx, z, xi;
  dx.assign(K, 0.0);
  if (!cfg_.drift.is_neutral()) {
    cfg_.drift.evaluate(x, dx);
    for (auto& v : dx) v *= h;
  }
  if (cfg_.sigma > 0.0) {
    z.resize(K * K);
    xi.resize(K);
    zeta(x, z);
    for (auto& v : xi) v = rng.normal();
    const double scale = std::sqrt(cfg_.sigma * h);
    for (std::size_t i = 0; i < K; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j <= i; ++j) s += z[i * K + j] * xi[j];
      dx[i] += scale * s;
    }
  }
  for (std::size_t i = 0; i < K; ++i) x[i] += dx[i];
  project_to_simplex(x);
}

void SdeIntegrator::jump(std::span<double> x, double h, RngStream& rng) const {
  if (jumps_.rate() == 0.0) return;
  const auto n = rng.poisson(jumps_.rate() * h);
  for (std::uint64_t e = 0; e < n; ++e) {
    const double z = jumps_.sample(rng);
    apply_jump(x, z, rng.categorical(x));
  }
}

void SdeIntegrator::step(std::span<double> x, double h, RngStream& rng) const {
  diffuse(x, h, rng);
  jump(x, h, rng);
}

int SdeIntegrator::clamp(std::span<double> x) const {
  if (cfg_.tol_ext <= 0.0) return 0;
  int zeroed = 0;
  for (auto& v : x)
    if (v > 0.0 && v <= cfg_.tol_ext) {
      v = 0.0;
      ++zeroed;
    }
  if (zeroed > 0) project_to_simplex(x);
  return zeroed;
}

std::vector<SimplexPoint> sde_states_at(const SdeIntegrator& sde, const SimplexPoint& x0,
                                        std::span<const double> times, RngStream& rng) {
  const double dt = sde.config().dt;
  std::vector<double> x = x0.vector();
  std::vector<SimplexPoint> out;
  out.reserve(times.size());
  long k = 0;
  // A vertex is absorbing for mutation-free drifts: no drift, no noise, and
  // every jump targets the fixed allele.
  const bool absorbing = sde.config().drift.mutation_free();
  bool frozen = false;
  for (double target : times) {
    const auto until = static_cast<long>(std::llround(target / dt));
    if (until < k) throw std::invalid_argument("sde_states_at needs nondecreasing times");
    for (; k < until; ++k) {
      if (frozen) {
        k = until;
        break;
      }
      sde.step(x, dt, rng);
      sde.clamp(x);
      frozen = absorbing && std::count_if(x.begin(), x.end(), [](double v) { return v > 0.0; }) == 1;
    }
    out.push_back(SimplexPoint::project(x));
  }
  return out;
}

SimplexPoint step_em(const SdeIntegrator& sde, const SimplexPoint& x, RngStream& rng) {
  auto v = x.vector();
  sde.step(v, sde.config().dt, rng);
  return SimplexPoint::project(std::move(v));
}

SdeRun simulate_sde(const SdeIntegrator& sde, const SimplexPoint& x0, const SdeRunOptions& opts, RngStream& rng) {
  const std::size_t K = sde.K();
  if (x0.size() != K) throw std::invalid_argument("initial state has the wrong dimension");
  const auto& cfg = sde.config();
  const bool can_stop = opts.stop_at_fixation && cfg.drift.mutation_free();

  SdeRun run;
  run.extinction_times.assign(K, std::numeric_limits<double>::quiet_NaN());
  std::vector<double> x = x0.vector();
  for (std::size_t i = 0; i < K; ++i)
    if (x[i] == 0.0) run.extinction_times[i] = 0.0;

  auto note_state = [&](double t) {
    std::size_t positive = 0, last = 0;
    for (std::size_t i = 0; i < K; ++i) {
      if (x[i] > 0.0) {
        ++positive;
        last = i;
      } else if (std::isnan(run.extinction_times[i])) {
        run.extinction_times[i] = t;
      }
    }
    if (positive == 1 && !run.fixed_allele) {
      run.fixed_allele = last;
      run.fixation_time = t;
    }
  };
  note_state(0.0);
  run.trajectory.push(0.0, SimplexPoint::project(x));

  const long steps = sde.steps();
  double t = 0.0;
  long k = 0;
  bool recorded_last = true;
  while (k < steps) {
    if (can_stop && run.fixed_allele) break;
    ++k;
    const double next = std::min(static_cast<double>(k) * cfg.dt, cfg.horizon);
    sde.step(x, next - t, rng);
    t = next;
    run.clamp_events += sde.clamp(x);
    note_state(t);
    recorded_last = false;
    if (opts.record_every > 0 && k % opts.record_every == 0) {
      run.trajectory.push(t, SimplexPoint::project(x));
      recorded_last = true;
    }
  }
  run.final_state = SimplexPoint::project(x);
  run.end_time = t;
  if (!recorded_last) run.trajectory.push(t, run.final_state);
  return run;
}

}  // namespace lwf
