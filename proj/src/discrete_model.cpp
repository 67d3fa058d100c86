#include "lwf/discrete_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace lwf {

namespace {

// p^N(x) by exact enumeration over sample sizes.
void exact_type_prob(const ColouringRule& rule, const OffspringLaw& Q, std::span<const double> x,
                     std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (int k = 1; k <= std::max(Q.max_size(), 1); ++k) {
    const double w = Q.prob(k);
    if (w == 0.0) continue;
    const auto q = sample_size_type_prob(rule, k, x);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += w * q[i];
  }
}

// Type law of an offspring with a single potential parent.
void singleton_type_prob(const ColouringRule& rule, std::span<const double> x, std::span<double> out) {
  const std::size_t K = rule.K();
  std::fill(out.begin(), out.end(), 0.0);
  std::vector<int> z(K, 0);
  std::vector<double> c(K);
  for (std::size_t j = 0; j < K; ++j) {
    if (x[j] == 0.0) continue;
    z[j] = 1;
    colour_distribution(rule, z, c);
    z[j] = 0;
    for (std::size_t i = 0; i < K; ++i) out[i] += x[j] * c[i];
  }
}

std::vector<double> frequencies(std::span<const long> counts, long N) {
  std::vector<double> x(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) x[i] = static_cast<double>(counts[i]) / static_cast<double>(N);
  return x;
}

bool monomorphic(std::span<const long> counts, long N) {
  return std::any_of(counts.begin(), counts.end(), [N](long c) { return c == N; });
}

}  // namespace

DiscreteModel::DiscreteModel(ScalingSchedule schedule, ColouringRule rule, StepMethod method)
    : schedule_(std::move(schedule)), rule_(std::move(rule)), method_(method) {
  const auto& Q = schedule_.offspring_law();
  for (int k = 2; k <= Q.max_size(); ++k)
    if (Q.tail(k) > 0.0 && !rule_.accepts_sample_size(k))
      throw std::invalid_argument(std::string(rule_.kind_name()) + " rule does not accept samples of size " +
                                  std::to_string(k));
  const bool small = Q.max_size() <= kExactEnumerationMaxSize && enumeration_terms(K(), Q) <= kAggregatedStepMaxTerms;
  if (method_ == StepMethod::Auto) method_ = small ? StepMethod::Aggregated : StepMethod::PerIndividual;
  if (method_ == StepMethod::Aggregated && !small)
    throw std::invalid_argument("aggregated step needs sample sizes <= 12 and a small enumeration");
}

DiscreteModel DiscreteModel::without_extreme_events() const {
  return DiscreteModel(schedule_.without_extreme_events(), rule_, method_);
}

std::vector<long> apportion(const SimplexPoint& x, long N) {
  if (N < 1) throw std::invalid_argument("population size must be positive");
  const std::size_t K = x.size();
  std::vector<long> counts(K);
  std::vector<std::pair<double, std::size_t>> rem(K);
  long assigned = 0;
  for (std::size_t i = 0; i < K; ++i) {
    const double target = x[i] * static_cast<double>(N);
    counts[i] = static_cast<long>(std::floor(target));
    assigned += counts[i];
    rem[i] = {target - static_cast<double>(counts[i]), i};
  }
  // Largest remainders first; ties go to the lower label.
  std::stable_sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t r = 0; assigned < N; ++r, ++assigned) ++counts[rem[r % K].second];
  return counts;
}

SimplexPoint counts_to_point(std::span<const long> counts, long N) {
  return SimplexPoint(frequencies(counts, N));
}

void sample_multinomial(long n, std::span<const double> p, RngStream& rng, std::span<long> out) {
  double rest = 0.0;
  for (double v : p) rest += v;
  long left = n;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (left == 0 || i + 1 == p.size()) {
      out[i] = i + 1 == p.size() ? left : 0;
      left -= out[i];
      continue;
    }
    const double q = rest > 0.0 ? std::clamp(p[i] / rest, 0.0, 1.0) : 0.0;
    out[i] = rng.binomial(left, q);
    left -= out[i];
    rest -= p[i];
  }
  // A trailing zero-probability class can only receive draws through rounding.
  if (!p.empty() && p.back() == 0.0 && out.back() > 0) {
    std::size_t j = p.size() - 1;
    while (j > 0 && p[j] == 0.0) --j;
    out[j] += out.back();
    out.back() = 0;
  }
}

void ordinary_generation(const DiscreteModel& m, std::span<long> counts, RngStream& rng) {
  const std::size_t K = m.K();
  const long N = m.N();
  const auto x = frequencies(counts, N);
  std::vector<double> p(K);
  if (m.method() == StepMethod::Aggregated) {
    exact_type_prob(m.rule(), m.offspring_law(), x, p);
    sample_multinomial(N, p, rng, counts);
    return;
  }
  const auto& Q = m.offspring_law();
  const long singles = rng.binomial(N, 1.0 - Q.rho());
  singleton_type_prob(m.rule(), x, p);
  std::vector<long> next(K, 0);
  sample_multinomial(singles, p, rng, next);
  std::vector<int> z(K);
  std::vector<double> c(K);
  for (long v = singles; v < N; ++v) {
    const int k = Q.sample_tail(rng);
    std::fill(z.begin(), z.end(), 0);
    for (int j = 0; j < k; ++j) ++z[rng.categorical(x)];
    colour_distribution(m.rule(), z, c);
    ++next[rng.categorical(c)];
  }
  std::copy(next.begin(), next.end(), counts.begin());
}

void extreme_generation(const DiscreteModel& m, std::span<long> counts, double z, RngStream& rng) {
  const long N = m.N();
  const auto x = frequencies(counts, N);
  const std::size_t J = rng.categorical(x);
  const long block = rng.binomial(N, z);
  sample_multinomial(N - block, x, rng, counts);
  counts[J] += block;
}

void step_counts(const DiscreteModel& m, std::span<long> counts, RngStream& rng) {
  if (m.gamma() > 0.0 && rng.uniform() < m.gamma()) {
    const double z = m.schedule().extreme_size_law().sample(rng);
    extreme_generation(m, counts, z, rng);
  } else {
    ordinary_generation(m, counts, rng);
  }
}

SimplexPoint step_generation(const DiscreteModel& m, const SimplexPoint& x, RngStream& rng) {
  auto counts = apportion(x, m.N());
  step_counts(m, counts, rng);
  return counts_to_point(counts, m.N());
}

SimplexPoint step_extreme(const DiscreteModel& m, const SimplexPoint& x, double z, RngStream& rng) {
  if (!(z >= 0.0 && z <= 1.0)) throw std::invalid_argument("extreme-event size must be in [0, 1]");
  auto counts = apportion(x, m.N());
  extreme_generation(m, counts, z, rng);
  return counts_to_point(counts, m.N());
}

Trajectory simulate_discrete(const DiscreteModel& m, const SimplexPoint& x0, long generations,
                             long record_every, RngStream& rng) {
  if (generations < 0) throw std::invalid_argument("generations must be nonnegative");
  if (record_every < 1) throw std::invalid_argument("record_every must be >= 1");
  if (x0.size() != m.K()) throw std::invalid_argument("initial state has the wrong dimension");
  const long N = m.N();
  auto counts = apportion(x0, N);
  Trajectory tr;
  tr.push(0.0, counts_to_point(counts, N));
  const bool absorbing = m.rule().mutation_free();
  for (long g = 1; g <= generations; ++g) {
    if (absorbing && monomorphic(counts, N)) {
      const SimplexPoint fixed = counts_to_point(counts, N);
      for (long h = g; h <= generations; ++h)
        if (h % record_every == 0) tr.push(static_cast<double>(h), fixed);
      break;
    }
    step_counts(m, counts, rng);
    if (g % record_every == 0) tr.push(static_cast<double>(g), counts_to_point(counts, N));
  }
  return tr;
}

SimplexPoint run_discrete(const DiscreteModel& m, const SimplexPoint& x0, long generations, RngStream& rng) {
  const long N = m.N();
  auto counts = apportion(x0, N);
  const bool absorbing = m.rule().mutation_free();
  for (long g = 0; g < generations; ++g) {
    if (absorbing && monomorphic(counts, N)) break;
    step_counts(m, counts, rng);
  }
  return counts_to_point(counts, N);
}

DriftEstimate empirical_drift(const DiscreteModel& m, const SimplexPoint& x, std::size_t samples,
                              std::uint64_t seed, const Execution& ex) {
  const std::size_t K = m.K();
  if (x.size() != K) throw std::invalid_argument("frequency vector has the wrong dimension");
  const double kappa = m.schedule().kappa();
  const auto& Q = m.offspring_law();
  DriftEstimate est{std::vector<double>(K, 0.0), std::vector<double>(K, 0.0), samples, false};
  // The neutral colour law is the sampled type itself, so q = x exactly.
  const bool neutral = std::holds_alternative<rules::Neutral>(m.rule().variant());
  if (Q.max_size() < 2 || samples == 0 || neutral) {
    est.exact = true;
    return est;
  }

  struct Moments {
    std::vector<double> sum, sum2;
  };
  const std::size_t chunks = (samples + kDriftChunk - 1) / kDriftChunk;
  auto parts = run_replicates(
      chunks,
      [&](std::size_t c) {
        RngStream rng(seed, c);
        const std::size_t n = std::min(kDriftChunk, samples - c * kDriftChunk);
        Moments mo{std::vector<double>(K, 0.0), std::vector<double>(K, 0.0)};
        std::vector<int> z(K);
        std::vector<double> col(K);
        for (std::size_t s = 0; s < n; ++s) {
          const int k = Q.sample_tail(rng);
          std::fill(z.begin(), z.end(), 0);
          for (int j = 0; j < k; ++j) ++z[rng.categorical(x.values())];
          colour_distribution(m.rule(), z, col);
          for (std::size_t i = 0; i < K; ++i) {
            mo.sum[i] += col[i];
            mo.sum2[i] += col[i] * col[i];
          }
        }
        return mo;
      },
      ex);

  std::vector<double> sum(K, 0.0), sum2(K, 0.0);
  for (const auto& p : parts)
    for (std::size_t i = 0; i < K; ++i) {
      sum[i] += p.sum[i];
      sum2[i] += p.sum2[i];
    }
  const auto n = static_cast<double>(samples);
  for (std::size_t i = 0; i < K; ++i) {
    const double mean = sum[i] / n;
    const double var = samples > 1 ? std::max(sum2[i] - n * mean * mean, 0.0) / (n - 1.0) : 0.0;
    est.mean[i] = kappa * (mean - x[i]);
    est.std_error[i] = kappa * std::sqrt(var / n);
  }
  return est;
}

DriftEstimate exact_drift(const DiscreteModel& m, const SimplexPoint& x) {
  const std::size_t K = m.K();
  const double kappa = m.schedule().kappa();
  const double rho = m.schedule().rho();
  const auto p = offspring_type_prob(m.rule(), m.offspring_law(), x);
  DriftEstimate est{std::vector<double>(K), std::vector<double>(K), 0, p.exact};
  for (std::size_t i = 0; i < K; ++i) {
    est.mean[i] = kappa * (p.probs[i] - x[i]) / rho;
    est.std_error[i] = kappa * p.std_errors[i] / rho;
  }
  return est;
}

}  // namespace lwf
