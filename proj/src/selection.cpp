#include "lwf/selection.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace lwf {

std::vector<double> mu_transitive(double kappa, std::span<const double> pi, std::span<const double> x) {
  const std::size_t K = x.size();
  std::vector<double> mu(K, 0.0);
  double below = 0.0;  // x_1 + ... + x_{i-1}
  for (std::size_t i = 0; i < K; ++i) {
    const double upto = below + x[i];
    double s = 0.0;
    for (std::size_t k = 1; k < pi.size(); ++k) {
      if (pi[k] == 0.0) continue;
      const auto e = static_cast<int>(k) + 1;
      s += pi[k] * (std::pow(upto, e) - std::pow(below, e) - x[i]);
    }
    mu[i] = kappa * s;
    below = upto;
  }
  return mu;
}

std::vector<double> mu_logistic(double kappa, std::span<const double> p, std::span<const double> x) {
  const std::size_t K = x.size();
  if (p.size() != K * K) throw std::invalid_argument("logistic matrix must be K x K");
  std::vector<double> mu(K, 0.0);
  for (std::size_t i = 0; i < K; ++i) {
    double s = 1.0 - x[i];
    for (std::size_t j = 0; j < K; ++j)
      if (j != i) s -= 2.0 * p[j * K + i] * x[j];
    mu[i] = kappa * x[i] * s;
  }
  return mu;
}

std::vector<double> mu_rps(double kappa, std::span<const double> x) {
  if (x.size() != 3) throw std::invalid_argument("rock-paper-scissors drift needs K = 3");
  std::vector<double> mu(3);
  for (std::size_t i = 0; i < 3; ++i) mu[i] = kappa * x[i] * (x[(i + 2) % 3] - x[(i + 1) % 3]);
  return mu;
}

std::vector<double> food_web_matrix(std::size_t K, std::span<const char> beats) {
  if (beats.size() != K * K) throw std::invalid_argument("beats relation must be K x K");
  std::vector<double> p(K * K, 0.5);
  for (std::size_t i = 0; i < K; ++i)
    for (std::size_t j = 0; j < K; ++j) {
      if (beats[i * K + j] && beats[j * K + i]) throw std::invalid_argument("beats relation must be antisymmetric");
      if (beats[i * K + j]) {
        p[i * K + j] = 1.0;
        p[j * K + i] = 0.0;
      }
    }
  return p;
}

std::vector<double> mu_food_web(double kappa, std::span<const char> beats, std::span<const double> x) {
  const auto p = food_web_matrix(x.size(), beats);
  return mu_logistic(kappa, p, x);
}

std::vector<double> mu_negfreq(double kappa, std::span<const double> x) {
  const std::size_t K = x.size();
  std::vector<double> mu(K);
  double sq = 0.0;
  for (double v : x) sq += v * v;
  for (std::size_t i = 0; i < K; ++i)
    mu[i] = 2.0 * kappa * x[i] * ((sq - x[i] * x[i]) - x[i] * (1.0 - x[i]));
  return mu;
}

std::vector<double> mu_posfreq(double kappa, std::span<const double> x) {
  const std::size_t K = x.size();
  std::vector<double> mu(K);
  double sum = 0.0, sq = 0.0;
  for (double v : x) {
    sum += v;
    sq += v * v;
  }
  for (std::size_t i = 0; i < K; ++i) {
    // Sum over ordered pairs j != k of types other than i.
    const double rest = sum - x[i];
    const double pairs = rest * rest - (sq - x[i] * x[i]);
    mu[i] = kappa * x[i] * ((2.0 * x[i] - 1.0) * (1.0 - x[i]) + pairs);
  }
  return mu;
}

std::vector<double> mu_from_polynomial(double lambda, const PolynomialMap& g, std::span<const double> x) {
  auto gx = g(x);
  for (std::size_t i = 0; i < gx.size(); ++i) gx[i] = lambda * (gx[i] - x[i]);
  return gx;
}

namespace {

bool polynomial_mutation_free(const PolynomialMap& g) {
  for (std::size_t i = 0; i < g.K(); ++i)
    for (const auto& m : g.components()[i])
      if (m.coeff != 0.0 && m.exponents[i] == 0) return false;
  return true;
}

bool is_point_tail(const OffspringLaw& tail, int k) { return tail.max_size() == k && tail.tail(k) == 1.0; }

}  // namespace

DriftFunction::DriftFunction(std::size_t K, Variant v) : K_(K), v_(std::move(v)) {
  if (K < 2) throw std::invalid_argument("drift needs K >= 2");
  std::visit(
      [&](const auto& d) {
        using D = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<D, drifts::Logistic>) {
          if (d.p.size() != K * K) throw std::invalid_argument("logistic matrix must be K x K");
        } else if constexpr (std::is_same_v<D, drifts::Rps>) {
          if (K != 3) throw std::invalid_argument("rock-paper-scissors drift needs K = 3");
        } else if constexpr (std::is_same_v<D, drifts::FoodWeb>) {
          food_web_matrix(K, d.beats);
        } else if constexpr (std::is_same_v<D, drifts::Transitive>) {
          for (double w : d.pi)
            if (!(w >= 0.0)) throw std::invalid_argument("pi weights must be nonnegative");
        } else if constexpr (std::is_same_v<D, drifts::FromPolynomial>) {
          if (d.g.K() != K) throw std::invalid_argument("polynomial map dimension mismatch");
          mutation_free_ = polynomial_mutation_free(d.g);
        } else if constexpr (std::is_same_v<D, drifts::RuleExpectation>) {
          if (d.rule.K() != K) throw std::invalid_argument("rule dimension mismatch");
          for (int k = 2; k <= d.tail.max_size(); ++k)
            if (d.tail.tail(k) > 0.0 && !d.rule.accepts_sample_size(k))
              throw std::domain_error("rule does not accept samples of size " + std::to_string(k));
          mutation_free_ = d.rule.mutation_free();
        }
      },
      v_);
}

std::string_view DriftFunction::kind_name() const noexcept {
  struct Name {
    std::string_view operator()(const drifts::Neutral&) const { return "neutral"; }
    std::string_view operator()(const drifts::Transitive&) const { return "transitive"; }
    std::string_view operator()(const drifts::Logistic&) const { return "logistic"; }
    std::string_view operator()(const drifts::Rps&) const { return "rps"; }
    std::string_view operator()(const drifts::FoodWeb&) const { return "food_web"; }
    std::string_view operator()(const drifts::NegFreqDep&) const { return "neg_freq_dep"; }
    std::string_view operator()(const drifts::PosFreqDep&) const { return "pos_freq_dep"; }
    std::string_view operator()(const drifts::FromPolynomial&) const { return "polynomial"; }
    std::string_view operator()(const drifts::RuleExpectation&) const { return "rule_expectation"; }
  };
  return std::visit(Name{}, v_);
}

std::vector<double> DriftFunction::operator()(std::span<const double> x) const {
  std::vector<double> out(K_);
  evaluate(x, out);
  return out;
}

void DriftFunction::evaluate(std::span<const double> x, std::span<double> out) const {
  if (x.size() != K_ || out.size() != K_) throw std::invalid_argument("drift dimension mismatch");
  std::vector<double> mu = std::visit(
      [&](const auto& d) -> std::vector<double> {
        using D = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<D, drifts::Neutral>) return std::vector<double>(K_, 0.0);
        else if constexpr (std::is_same_v<D, drifts::Transitive>) return mu_transitive(d.kappa, d.pi, x);
        else if constexpr (std::is_same_v<D, drifts::Logistic>) return mu_logistic(d.kappa, d.p, x);
        else if constexpr (std::is_same_v<D, drifts::Rps>) return mu_rps(d.kappa, x);
        else if constexpr (std::is_same_v<D, drifts::FoodWeb>) return mu_food_web(d.kappa, d.beats, x);
        else if constexpr (std::is_same_v<D, drifts::NegFreqDep>) return mu_negfreq(d.kappa, x);
        else if constexpr (std::is_same_v<D, drifts::PosFreqDep>) return mu_posfreq(d.kappa, x);
        else if constexpr (std::is_same_v<D, drifts::FromPolynomial>) return mu_from_polynomial(d.lambda, d.g, x);
        else {
          std::vector<double> q(K_, 0.0);
          for (int k = 2; k <= d.tail.max_size(); ++k) {
            const double w = d.tail.tail(k);
            if (w == 0.0) continue;
            const auto qk = sample_size_type_prob(d.rule, k, x);
            for (std::size_t i = 0; i < K_; ++i) q[i] += w * qk[i];
          }
          for (std::size_t i = 0; i < K_; ++i) q[i] = d.kappa * (q[i] - x[i]);
          return q;
        }
      },
      v_);
  std::copy(mu.begin(), mu.end(), out.begin());
}

DriftFunction drift_for_rule(const ColouringRule& rule, const OffspringLaw& tail, double kappa) {
  const std::size_t K = rule.K();
  auto generic = [&] { return DriftFunction(K, drifts::RuleExpectation{kappa, rule, tail}); };
  if (tail.max_size() < 2) return DriftFunction::neutral(K);

  return std::visit(
      [&](const auto& r) -> DriftFunction {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, rules::Neutral>) {
          return DriftFunction::neutral(K);
        } else if constexpr (std::is_same_v<R, rules::Transitive>) {
          std::vector<double> pi(static_cast<std::size_t>(tail.max_size()), 0.0);
          for (int k = 2; k <= tail.max_size(); ++k) pi[static_cast<std::size_t>(k - 1)] = tail.tail(k);
          return DriftFunction(K, drifts::Transitive{kappa, std::move(pi)});
        } else if constexpr (std::is_same_v<R, rules::TransitiveWithMutation>) {
          if (rule.mutation_free()) return drift_for_rule(ColouringRule::transitive(K), tail, kappa);
          return generic();
        } else if constexpr (std::is_same_v<R, rules::Logistic>) {
          if (!is_point_tail(tail, 2)) throw std::domain_error("logistic rule needs the sample-size tail delta_2");
          return DriftFunction(K, drifts::Logistic{kappa, r.p});
        } else if constexpr (std::is_same_v<R, rules::PartialOrder>) {
          if (!is_point_tail(tail, 2)) return generic();
          const std::vector<char> rps{0, 0, 1, 1, 0, 0, 0, 1, 0};
          if (K == 3 && r.beats == rps) return DriftFunction(K, drifts::Rps{kappa});
          return DriftFunction(K, drifts::FoodWeb{kappa, r.beats});
        } else if constexpr (std::is_same_v<R, rules::NegFreqDep>) {
          if (!is_point_tail(tail, 3)) return generic();
          return DriftFunction(K, drifts::NegFreqDep{kappa});
        } else if constexpr (std::is_same_v<R, rules::PosFreqDep>) {
          if (!is_point_tail(tail, 3)) return generic();
          return DriftFunction(K, drifts::PosFreqDep{kappa});
        } else {
          if (r.degree > 1 && !is_point_tail(tail, r.degree))
            throw std::domain_error("Bernstein rule of degree " + std::to_string(r.degree) +
                                    " needs the sample-size tail delta_" + std::to_string(r.degree));
          return DriftFunction(K, drifts::FromPolynomial{kappa, bernstein_polynomial(rule)});
        }
      },
      rule.variant());
}

double selection_coefficient(const DriftFunction& mu, std::span<const double> x, std::size_t i) {
  const double v = x[i] * (1.0 - x[i]);
  if (!(v > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return mu(x)[i] / v;
}

}  // namespace lwf
