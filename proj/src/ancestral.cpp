#include "lwf/ancestral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <string>

namespace lwf {

AncestralModel::AncestralModel(double kappa, double sigma, std::vector<double> tail, LambdaMeasure L,
                               long table_cap)
    : kappa_(kappa), sigma_(sigma), tail_(std::move(tail)), lambda_(std::move(L)), table_cap_(table_cap) {
  if (!(kappa >= 0.0)) throw std::invalid_argument("kappa must be nonnegative");
  if (!(sigma >= 0.0)) throw std::invalid_argument("sigma must be nonnegative");
  if (table_cap < 1) throw std::invalid_argument("rate table cap must be >= 1");
  double total = 0.0;
  for (std::size_t k = 0; k < tail_.size(); ++k) {
    if (!(tail_[k] >= 0.0)) throw std::invalid_argument("branching tail must be nonnegative");
    if (k < 2 && tail_[k] != 0.0) throw std::invalid_argument("branching tail starts at sample size 2");
    total += tail_[k];
  }
  if (kappa > 0.0 && std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("branching tail must sum to 1 when kappa > 0");
  table_.resize(static_cast<std::size_t>(table_cap_) + 1);
  for (long n = 1; n <= table_cap_; ++n) table_[static_cast<std::size_t>(n)] = compute_rates(n);
}

double AncestralModel::beta() const noexcept {
  double b = 0.0;
  for (std::size_t k = 2; k < tail_.size(); ++k) b += static_cast<double>(k - 1) * tail_[k];
  return b;
}

double AncestralModel::kappa_star() const {
  // Without branching nothing can push the block count up.
  const double b = beta();
  if (!(b > 0.0)) return std::numeric_limits<double>::infinity();
  return lwf::kappa_star(lambda_, b);
}

bool AncestralModel::recurrent() const {
  if (kappa_ == 0.0 || sigma_ > 0.0) return true;
  return kappa_ < kappa_star();
}

std::vector<Transition> AncestralModel::compute_rates(long n) const {
  std::map<long, double> by_target;
  if (kappa_ > 0.0)
    for (std::size_t k = 2; k < tail_.size(); ++k)
      if (tail_[k] > 0.0) by_target[n + static_cast<long>(k) - 1] += kappa_ * static_cast<double>(n) * tail_[k];
  if (sigma_ > 0.0 && n >= 2) by_target[n - 1] += sigma_ * 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
  if (!lambda_.is_zero())
    for (long k = 2; k <= n; ++k) {
      const double r = collision_rate(lambda_, n, k);
      if (r > 0.0) by_target[n - k + 1] += r;
    }
  std::vector<Transition> out;
  out.reserve(by_target.size());
  for (auto [t, r] : by_target)
    if (r > 0.0) out.push_back({t, r});
  return out;
}

std::vector<Transition> AncestralModel::rates(long n) const {
  if (n < 1) throw std::invalid_argument("block count must be >= 1");
  if (n <= table_cap_) return table_[static_cast<std::size_t>(n)];
  return compute_rates(n);
}

const std::vector<Transition>& AncestralModel::rates_ref(long n, std::vector<Transition>& scratch) const {
  if (n >= 1 && n <= table_cap_) return table_[static_cast<std::size_t>(n)];
  scratch = rates(n);
  return scratch;
}

double AncestralModel::total_rate(long n) const {
  double s = 0.0;
  for (const auto& t : rates(n)) s += t.rate;
  return s;
}

std::vector<Transition> ancestral_rates(const AncestralModel& m, long n) { return m.rates(n); }

namespace {

// One Gillespie jump from n; returns false if n is absorbing.
struct Jump {
  double wait;
  long target;
};

bool next_jump(const AncestralModel& m, long n, RngStream& rng, Jump& out) {
  thread_local std::vector<Transition> scratch;
  const auto& row = m.rates_ref(n, scratch);
  double total = 0.0;
  for (const auto& t : row) total += t.rate;
  if (total <= 0.0) return false;
  out.wait = rng.exponential(total);
  double u = rng.uniform() * total;
  out.target = row.back().target;
  for (const auto& t : row) {
    if (u < t.rate) {
      out.target = t.target;
      break;
    }
    u -= t.rate;
  }
  return true;
}

void check_guard(long n) {
  if (n > kExplosionGuard)
    throw RateExplosion("block count exceeded " + std::to_string(kExplosionGuard) +
                        "; the ancestral process is transient for these parameters");
}

}  // namespace

AncestralPath simulate_ancestral(const AncestralModel& m, long n0, double horizon, RngStream& rng) {
  if (n0 < 1) throw std::invalid_argument("initial block count must be >= 1");
  AncestralPath path{{0.0}, {n0}};
  double t = 0.0;
  long n = n0;
  Jump j{};
  while (next_jump(m, n, rng, j)) {
    if (t + j.wait > horizon) break;
    t += j.wait;
    n = j.target;
    check_guard(n);
    path.times.push_back(t);
    path.states.push_back(n);
  }
  return path;
}

long ancestral_state_at(const AncestralModel& m, long n0, double t_end, RngStream& rng) {
  if (n0 < 1) throw std::invalid_argument("initial block count must be >= 1");
  double t = 0.0;
  long n = n0;
  Jump j{};
  while (next_jump(m, n, rng, j)) {
    if (t + j.wait > t_end) break;
    t += j.wait;
    n = j.target;
    check_guard(n);
  }
  return n;
}

long path_state_at(const AncestralPath& path, double t) {
  const auto it = std::upper_bound(path.times.begin(), path.times.end(), t);
  if (it == path.times.begin()) return path.states.front();
  return path.states[static_cast<std::size_t>(it - path.times.begin()) - 1];
}

double StationaryEstimate::pgf(double s) const {
  double v = 0.0, p = 1.0;
  for (double w : occupation) {
    p *= s;
    v += w * p;
  }
  return v;
}

namespace {

double batch_pgf(const std::vector<double>& occ, double s) {
  double v = 0.0, p = 1.0;
  for (double w : occ) {
    p *= s;
    v += w * p;
  }
  return v;
}

template <class F>
double batch_se(const std::vector<std::vector<double>>& batches, F&& stat) {
  const std::size_t B = batches.size();
  if (B < 2) return 0.0;
  std::vector<double> v(B);
  for (std::size_t b = 0; b < B; ++b) v[b] = stat(batches[b]);
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(B);
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(B - 1) / static_cast<double>(B));
}

}  // namespace

double StationaryEstimate::pgf_std_error(double s) const {
  return batch_se(batches, [s](const auto& occ) { return batch_pgf(occ, s); });
}

double StationaryEstimate::pgf_difference_std_error(double a, double b) const {
  return batch_se(batches, [a, b](const auto& occ) { return batch_pgf(occ, b) - batch_pgf(occ, a); });
}

StationaryEstimate stationary_and_pgf(const AncestralModel& m, const StationaryOptions& opts,
                                      std::uint64_t seed, const Execution& ex) {
  StationaryEstimate est;
  if (m.kappa() == 0.0) {
    if (m.sigma() == 0.0 && m.lambda().is_zero())
      throw std::invalid_argument("no resampling (sigma = 0, Lambda = 0): the chain never moves");
    est.occupation = {1.0};
    est.std_error = {0.0};
    est.batches = {{1.0}};
    return est;
  }
  if (!m.recurrent())
    throw TransienceDetected("kappa >= kappa* with sigma = 0: the ancestral process has no stationary law");
  if (opts.chains < 1 || opts.batches_per_chain < 1 || !(opts.time_per_chain > 0.0))
    throw std::invalid_argument("stationary estimation needs chains, batches and a positive run time");
  if (!(opts.burn_in_fraction >= 0.0 && opts.burn_in_fraction < 1.0))
    throw std::invalid_argument("burn-in fraction must be in [0, 1)");

  const double burn = opts.burn_in_fraction * opts.time_per_chain;
  const double window = (opts.time_per_chain - burn) / static_cast<double>(opts.batches_per_chain);
  const std::size_t per = opts.batches_per_chain;

  auto chains = run_replicates(
      opts.chains,
      [&](std::size_t c) {
        RngStream rng(seed, c);
        std::vector<std::vector<double>> occ(per);
        auto credit = [&](long n, double a, double b) {
          // Time in state n over [a, b), split across batch windows.
          a = std::max(a, burn);
          while (a < b) {
            const auto w = std::min(per - 1, static_cast<std::size_t>((a - burn) / window));
            const double end = std::min(b, burn + static_cast<double>(w + 1) * window);
            auto& row = occ[w];
            if (row.size() < static_cast<std::size_t>(n)) row.resize(static_cast<std::size_t>(n), 0.0);
            row[static_cast<std::size_t>(n) - 1] += end - a;
            if (end <= a) break;
            a = end;
          }
        };
        double t = 0.0;
        long n = opts.n0;
        Jump j{};
        for (;;) {
          const bool moves = next_jump(m, n, rng, j);
          const double until = moves ? std::min(t + j.wait, opts.time_per_chain) : opts.time_per_chain;
          credit(n, t, until);
          if (!moves || until >= opts.time_per_chain) break;
          t = until;
          n = j.target;
          if (n > opts.transience_cap)
            throw TransienceDetected("block count passed " + std::to_string(opts.transience_cap) +
                                     " while estimating the stationary law; the chain looks transient");
        }
        for (auto& row : occ) {
          const double s = std::accumulate(row.begin(), row.end(), 0.0);
          if (s > 0.0)
            for (auto& v : row) v /= s;
        }
        return occ;
      },
      ex);

  std::size_t n_max = 1;
  for (const auto& ch : chains)
    for (const auto& row : ch) n_max = std::max(n_max, row.size());
  for (auto& ch : chains)
    for (auto& row : ch) {
      row.resize(n_max, 0.0);
      est.batches.push_back(std::move(row));
    }
  const auto B = static_cast<double>(est.batches.size());
  est.occupation.assign(n_max, 0.0);
  est.std_error.assign(n_max, 0.0);
  for (const auto& row : est.batches)
    for (std::size_t i = 0; i < n_max; ++i) est.occupation[i] += row[i] / B;
  for (std::size_t i = 0; i < n_max; ++i)
    est.std_error[i] = batch_se(est.batches, [i](const auto& occ) { return occ[i]; });
  est.total_time = opts.time_per_chain * static_cast<double>(opts.chains);
  est.burn_in = burn;
  return est;
}

FixationPrediction fixation_probabilities(const StationaryEstimate& nu, const SimplexPoint& x0) {
  const std::size_t K = x0.size();
  FixationPrediction out{std::vector<double>(K), std::vector<double>(K), true};
  double lo = 0.0;
  for (std::size_t i = 0; i < K; ++i) {
    const double hi = i + 1 == K ? 1.0 : std::min(lo + x0[i], 1.0);
    out.probs[i] = nu.pgf(hi) - nu.pgf(lo);
    out.std_errors[i] = nu.pgf_difference_std_error(lo, hi);
    lo = hi;
  }
  return out;
}

FixationPrediction fixation_probabilities(const AncestralModel& m, const SimplexPoint& x0,
                                          const StationaryOptions& opts, std::uint64_t seed,
                                          const Execution& ex) {
  const std::size_t K = x0.size();
  if (!m.recurrent()) {
    FixationPrediction out{std::vector<double>(K, 0.0), std::vector<double>(K, 0.0), false};
    std::size_t top = 0;
    for (std::size_t i = 0; i < K; ++i)
      if (x0[i] > 0.0) top = i;
    out.probs[top] = 1.0;
    return out;
  }
  if (m.kappa() == 0.0) return {x0.vector(), std::vector<double>(K, 0.0), true};
  return fixation_probabilities(stationary_and_pgf(m, opts, seed, ex), x0);
}

AncestralModel ancestral_model_for(const DriftFunction& drift, double sigma, const LambdaMeasure& L) {
  if (drift.is_neutral()) return AncestralModel(0.0, sigma, {}, L);
  const auto* tr = std::get_if<drifts::Transitive>(&drift.variant());
  if (!tr)
    throw std::invalid_argument("the ancestral process is only dual to transitive drifts, not " +
                                std::string(drift.kind_name()));
  std::vector<double> tail(tr->pi.size() + 1, 0.0);
  for (std::size_t k = 1; k < tr->pi.size(); ++k) tail[k + 1] = tr->pi[k];
  return AncestralModel(tr->kappa, sigma, std::move(tail), L);
}

}  // namespace lwf
