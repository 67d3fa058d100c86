#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "lwf/lambda_measure.hpp"
#include "lwf/replicate.hpp"
#include "lwf/rng.hpp"
#include "lwf/selection.hpp"
#include "lwf/simplex.hpp"

namespace lwf {

struct Transition {
  long target;
  double rate;
  friend bool operator==(const Transition&, const Transition&) = default;
};

/// Block-counting dual of the transitive frequency process. From n blocks:
///   n -> n+k-1 at rate kappa n tail(k)   (a block samples k potential parents),
///   n -> n-1   at rate sigma binom(n, 2),
///   n -> n-k+1 at rate binom(n, k) lambda_{n,k}, 2 <= k <= n.
class AncestralModel {
 public:
  /// `tail[k]`: sample-size law conditioned on more than one potential parent.
  AncestralModel(double kappa, double sigma, std::vector<double> tail, LambdaMeasure L,
                 long table_cap = 256);

  double kappa() const noexcept { return kappa_; }
  double sigma() const noexcept { return sigma_; }
  const std::vector<double>& tail() const noexcept { return tail_; }
  const LambdaMeasure& lambda() const noexcept { return lambda_; }
  long table_cap() const noexcept { return table_cap_; }
  /// sum_k (k-1) tail(k).
  double beta() const noexcept;
  double kappa_star() const;
  /// kappa == 0, sigma > 0 (binary mergers outpace linear branching) or
  /// kappa < kappa*.
  bool recurrent() const;

  /// Outgoing transitions from n, merged by target, zero rates dropped,
  /// sorted by target.
  std::vector<Transition> rates(long n) const;
  /// Cached row when n is within the table, otherwise computed into scratch.
  const std::vector<Transition>& rates_ref(long n, std::vector<Transition>& scratch) const;
  double total_rate(long n) const;

 private:
  std::vector<Transition> compute_rates(long n) const;

  double kappa_, sigma_;
  std::vector<double> tail_;
  LambdaMeasure lambda_;
  long table_cap_;
  std::vector<std::vector<Transition>> table_;  // index n, n <= table_cap
};

std::vector<Transition> ancestral_rates(const AncestralModel& m, long n);

/// The block count climbed past the explosion guard.
class RateExplosion : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The chain escaped every finite window while estimating a stationary law.
class TransienceDetected : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr long kExplosionGuard = 10'000'000;

struct AncestralPath {
  std::vector<double> times;
  std::vector<long> states;
};

/// Gillespie path on [0, horizon]; the first entry is (0, n0).
AncestralPath simulate_ancestral(const AncestralModel& m, long n0, double horizon, RngStream& rng);
/// Block count at time t only (no path storage).
long ancestral_state_at(const AncestralModel& m, long n0, double t, RngStream& rng);
/// Piecewise-constant lookup in a recorded path.
long path_state_at(const AncestralPath& path, double t);

struct StationaryOptions {
  long n0 = 1;
  /// Independent chains; each is split into `batches_per_chain` batches.
  std::size_t chains = 16;
  std::size_t batches_per_chain = 4;
  double time_per_chain = 2000.0;
  double burn_in_fraction = 0.1;
  /// Exceeding this block count counts as escape to infinity.
  long transience_cap = 2000;
};

struct StationaryEstimate {
  /// occupation[n - 1] estimates nu(n); n runs over 1..n_max.
  std::vector<double> occupation;
  std::vector<double> std_error;
  double total_time = 0.0;
  double burn_in = 0.0;
  /// Per-batch occupation fractions (rows sum to one).
  std::vector<std::vector<double>> batches;

  long n_max() const noexcept { return static_cast<long>(occupation.size()); }
  /// phi_nu(s) = sum_n nu(n) s^n.
  double pgf(double s) const;
  /// Batch-means standard error of pgf(s).
  double pgf_std_error(double s) const;
  /// Standard error of pgf(b) - pgf(a) from the same batches.
  double pgf_difference_std_error(double a, double b) const;
};

/// Stationary law nu: delta_1 exactly when kappa = 0, otherwise an
/// occupation-time estimate over independent chains.
StationaryEstimate stationary_and_pgf(const AncestralModel& m, const StationaryOptions& opts,
                                      std::uint64_t seed, const Execution& ex = {});

struct FixationPrediction {
  std::vector<double> probs;
  std::vector<double> std_errors;
  bool recurrent = true;
};

/// Increments phi(x_1+...+x_i) - phi(x_1+...+x_{i-1}).
FixationPrediction fixation_probabilities(const StationaryEstimate& nu, const SimplexPoint& x0);
/// Chooses the branch from the regime: pgf increments when recurrent, the
/// maximal present label otherwise.
FixationPrediction fixation_probabilities(const AncestralModel& m, const SimplexPoint& x0,
                                          const StationaryOptions& opts, std::uint64_t seed,
                                          const Execution& ex = {});

/// Dual model for a neutral or transitive drift; throws for any other kind.
AncestralModel ancestral_model_for(const DriftFunction& drift, double sigma, const LambdaMeasure& L);

}  // namespace lwf
