#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lwf/colouring.hpp"
#include "lwf/replicate.hpp"
#include "lwf/rng.hpp"
#include "lwf/schedule.hpp"
#include "lwf/simplex.hpp"
#include "lwf/trajectory.hpp"

namespace lwf {

/// How an ordinary generation is drawn. Both are exact:
///  - Aggregated: offspring types are iid categorical(p^N(x)) given x, so the
///    generation is one Multinomial(N, p^N(x)) draw with p^N enumerated exactly;
///  - PerIndividual: each offspring samples its potential parents explicitly
///    (singletons are still pooled into one multinomial draw).
/// Auto picks Aggregated when the enumeration is small.
enum class StepMethod { Auto, Aggregated, PerIndividual };

inline constexpr std::size_t kAggregatedStepMaxTerms = 20000;

class DiscreteModel {
 public:
  DiscreteModel(ScalingSchedule schedule, ColouringRule rule, StepMethod method = StepMethod::Auto);

  long N() const noexcept { return schedule_.N(); }
  std::size_t K() const noexcept { return rule_.K(); }
  const ScalingSchedule& schedule() const noexcept { return schedule_; }
  const ColouringRule& rule() const noexcept { return rule_; }
  const OffspringLaw& offspring_law() const noexcept { return schedule_.offspring_law(); }
  double gamma() const noexcept { return schedule_.gamma(); }
  /// Resolved step method (never Auto).
  StepMethod method() const noexcept { return method_; }
  /// kappa / rho_N: generations per unit of rescaled time.
  double generations_per_unit_time() const noexcept { return schedule_.kappa() / schedule_.rho(); }

  DiscreteModel without_extreme_events() const;

 private:
  ScalingSchedule schedule_;
  ColouringRule rule_;
  StepMethod method_;
};

/// Largest-remainder rounding of N x to integer counts summing to N.
std::vector<long> apportion(const SimplexPoint& x, long N);
SimplexPoint counts_to_point(std::span<const long> counts, long N);

/// Multinomial(n, p) by sequential conditional binomials; p need not be normalized.
void sample_multinomial(long n, std::span<const double> p, RngStream& rng, std::span<long> out);

/// One generation on integer counts (in place).
void step_counts(const DiscreteModel& m, std::span<long> counts, RngStream& rng);
/// Ordinary generation only (no extreme-event coin).
void ordinary_generation(const DiscreteModel& m, std::span<long> counts, RngStream& rng);
/// Extreme event with a given size z: one Binomial(N, z) block adopts a type
/// J ~ categorical(x), the rest of the offspring draw types from x.
void extreme_generation(const DiscreteModel& m, std::span<long> counts, double z, RngStream& rng);

/// x must be a multiple of 1/N (otherwise it is apportioned first).
SimplexPoint step_generation(const DiscreteModel& m, const SimplexPoint& x, RngStream& rng);
SimplexPoint step_extreme(const DiscreteModel& m, const SimplexPoint& x, double z, RngStream& rng);

/// Records generation 0 and every `record_every`-th generation up to G. For
/// mutation-free rules a monomorphic state ends the simulation and the
/// remaining records repeat it.
Trajectory simulate_discrete(const DiscreteModel& m, const SimplexPoint& x0, long generations,
                             long record_every, RngStream& rng);
/// State after exactly G generations, without recording.
SimplexPoint run_discrete(const DiscreteModel& m, const SimplexPoint& x0, long generations, RngStream& rng);

struct DriftEstimate {
  std::vector<double> mean;
  std::vector<double> std_error;
  std::size_t samples = 0;
  bool exact = false;
};

inline constexpr std::size_t kDriftChunk = 1 << 14;

/// Monte Carlo estimate of kappa (p^N(x) - x) / rho_N with extreme events
/// off. Each sample draws K_v from the tail of Q_N and averages the colour
/// distribution of the resulting potential-parent sample; samples are split
/// into fixed chunks with one stream each, so the estimate does not depend on
/// the thread count. The neutral rule short-circuits to exact zeros.
DriftEstimate empirical_drift(const DiscreteModel& m, const SimplexPoint& x, std::size_t samples,
                              std::uint64_t seed, const Execution& ex = {});
/// Same quantity from offspring_type_prob (exact when Q has no mass above
/// the enumeration limit).
DriftEstimate exact_drift(const DiscreteModel& m, const SimplexPoint& x);

}  // namespace lwf
