#pragma once

#include <optional>
#include <span>
#include <vector>

#include "lwf/lambda_measure.hpp"
#include "lwf/rng.hpp"
#include "lwf/selection.hpp"
#include "lwf/simplex.hpp"
#include "lwf/trajectory.hpp"

namespace lwf {

struct SdeConfig {
  DriftFunction drift;
  double sigma = 0.0;
  LambdaMeasure lambda;
  /// Jumps smaller than eps_jump are dropped (they are mean-zero).
  double eps_jump = 1e-3;
  double dt = 1e-3;
  double horizon = 1.0;
  /// Coordinates at or below tol_ext after a step are set to zero.
  double tol_ext = 0.0;
};

/// Lower-triangular factor with zeta zeta^T = x_i (1{i=j} - x_j), written
/// row-major into `out` (K*K entries). Entries whose denominators fall to
/// 1e-14 or below are set to zero.
void zeta(std::span<const double> x, std::span<double> out);
std::vector<double> zeta(const SimplexPoint& x);

/// x <- (1 - z) x + z e_i.
void apply_jump(std::span<double> x, double z, std::size_t i) noexcept;

class SdeIntegrator {
 public:
  explicit SdeIntegrator(SdeConfig cfg);

  const SdeConfig& config() const noexcept { return cfg_; }
  std::size_t K() const noexcept { return cfg_.drift.K(); }
  /// lambda_eps = int_{eps}^{1} Lambda(dz) / z^2.
  double jump_rate() const noexcept { return jumps_.rate(); }
  /// Lambda mass below the truncation (variance that is not simulated).
  double dropped_jump_mass() const noexcept { return jumps_.excluded_mass(); }
  /// dt * lambda_eps > 0.1: several jumps per step become common.
  bool coarse_jump_bins() const noexcept { return cfg_.dt * jump_rate() > 0.1; }
  /// Number of steps covering the horizon (the last one may be shorter).
  long steps() const noexcept { return steps_; }

  /// Euler-Maruyama step of length h followed by the jumps falling in it.
  /// Does not apply the extinction clamp.
  void step(std::span<double> x, double h, RngStream& rng) const;
  void diffuse(std::span<double> x, double h, RngStream& rng) const;
  void jump(std::span<double> x, double h, RngStream& rng) const;
  /// Zeroes coordinates at or below tol_ext; returns how many were zeroed.
  int clamp(std::span<double> x) const;

 private:
  SdeConfig cfg_;
  TruncatedJumpLaw jumps_;
  long steps_ = 0;
};

SimplexPoint step_em(const SdeIntegrator& sde, const SimplexPoint& x, RngStream& rng);

struct SdeRunOptions {
  /// Record every n-th step (0: only the start and the end).
  long record_every = 0;
  /// End the run once one allele is fixed (only for mutation-free drifts).
  bool stop_at_fixation = true;
};

struct SdeRun {
  Trajectory trajectory;
  SimplexPoint final_state{std::vector<double>{1.0, 0.0}};
  double end_time = 0.0;
  /// Time each allele first hit zero (NaN if it never did).
  std::vector<double> extinction_times;
  std::optional<double> fixation_time;
  std::optional<std::size_t> fixed_allele;
  /// Coordinates zeroed by the tol_ext clamp.
  long clamp_events = 0;
};

/// States at the given nondecreasing times (each rounded to the step grid),
/// with the extinction clamp applied after every step.
std::vector<SimplexPoint> sde_states_at(const SdeIntegrator& sde, const SimplexPoint& x0,
                                        std::span<const double> times, RngStream& rng);

SdeRun simulate_sde(const SdeIntegrator& sde, const SimplexPoint& x0, const SdeRunOptions& opts, RngStream& rng);

}  // namespace lwf
