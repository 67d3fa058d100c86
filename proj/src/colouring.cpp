#include "lwf/colouring.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lwf/combinatorics.hpp"

namespace lwf {

int SampleCounts::total() const noexcept {
  int t = 0;
  for (int c : counts) t += c;
  return t;
}

SampleCounts SampleCounts::from_labels(std::size_t K, std::span<const int> labels) {
  SampleCounts s{std::vector<int>(K, 0)};
  for (int l : labels) {
    if (l < 0 || static_cast<std::size_t>(l) >= K) throw std::out_of_range("type label out of range");
    ++s.counts[static_cast<std::size_t>(l)];
  }
  return s;
}

namespace {

void check_K(std::size_t K) {
  if (K < 2) throw std::invalid_argument("colouring rule needs K >= 2 types");
}

bool is_identity_kernel(std::size_t K, const std::vector<double>& kernel) {
  for (std::size_t i = 0; i < K; ++i)
    for (std::size_t j = 0; j < K; ++j)
      if (kernel[i * K + j] != (i == j ? 1.0 : 0.0)) return false;
  return true;
}

std::string format_index(std::span<const int> z) {
  std::ostringstream os;
  os << '(';
  for (std::size_t r = 0; r < z.size(); ++r) os << (r ? "," : "") << z[r];
  os << ')';
  return os.str();
}

}  // namespace

ColouringRule ColouringRule::neutral(std::size_t K) {
  check_K(K);
  return {K, rules::Neutral{}, true};
}

ColouringRule ColouringRule::transitive(std::size_t K) {
  check_K(K);
  return {K, rules::Transitive{}, true};
}

ColouringRule ColouringRule::transitive_with_mutation(std::size_t K, double m, std::vector<double> kernel) {
  check_K(K);
  if (!(m >= 0.0 && m <= 1.0)) throw std::invalid_argument("mutation probability must be in [0, 1]");
  if (kernel.size() != K * K) throw std::invalid_argument("mutation kernel must be K x K");
  for (std::size_t i = 0; i < K; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < K; ++j) {
      const double v = kernel[i * K + j];
      if (!(v >= 0.0)) throw std::invalid_argument("mutation kernel entries must be nonnegative");
      row += v;
    }
    if (std::abs(row - 1.0) > 1e-12) throw std::invalid_argument("mutation kernel rows must sum to 1");
  }
  const bool free = m == 0.0 || is_identity_kernel(K, kernel);
  return {K, rules::TransitiveWithMutation{m, std::move(kernel)}, free};
}

ColouringRule ColouringRule::logistic(std::size_t K, std::vector<double> p) {
  check_K(K);
  if (p.size() != K * K) throw std::invalid_argument("logistic matrix must be K x K");
  for (std::size_t i = 0; i < K; ++i) {
    if (std::abs(p[i * K + i] - 0.5) > 1e-12) throw std::invalid_argument("logistic matrix needs p_ii = 1/2");
    for (std::size_t j = 0; j < K; ++j) {
      const double v = p[i * K + j];
      if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("logistic entries must be in [0, 1]");
      if (std::abs(v + p[j * K + i] - 1.0) > 1e-12)
        throw std::invalid_argument("logistic matrix needs p_ij + p_ji = 1");
    }
  }
  return {K, rules::Logistic{std::move(p)}, true};
}

ColouringRule ColouringRule::partial_order(std::size_t K, const std::vector<std::pair<int, int>>& edges) {
  check_K(K);
  std::vector<char> beats(K * K, 0);
  for (auto [w, l] : edges) {
    if (w < 0 || l < 0 || static_cast<std::size_t>(w) >= K || static_cast<std::size_t>(l) >= K)
      throw std::invalid_argument("beats relation refers to an unknown type");
    if (w == l) throw std::invalid_argument("a type cannot beat itself");
    beats[static_cast<std::size_t>(w) * K + static_cast<std::size_t>(l)] = 1;
  }
  for (std::size_t i = 0; i < K; ++i)
    for (std::size_t j = 0; j < K; ++j)
      if (beats[i * K + j] && beats[j * K + i])
        throw std::invalid_argument("beats relation must be antisymmetric");
  return {K, rules::PartialOrder{std::move(beats)}, true};
}

ColouringRule ColouringRule::rps() {
  return partial_order(3, {{1, 0}, {2, 1}, {0, 2}});
}

ColouringRule ColouringRule::neg_freq_dep(std::size_t K) {
  check_K(K);
  return {K, rules::NegFreqDep{}, true};
}

ColouringRule ColouringRule::pos_freq_dep(std::size_t K) {
  check_K(K);
  return {K, rules::PosFreqDep{}, true};
}

std::string_view ColouringRule::kind_name() const noexcept {
  struct Name {
    std::string_view operator()(const rules::Neutral&) const { return "neutral"; }
    std::string_view operator()(const rules::Transitive&) const { return "transitive"; }
    std::string_view operator()(const rules::TransitiveWithMutation&) const { return "transitive_mutation"; }
    std::string_view operator()(const rules::Logistic&) const { return "logistic"; }
    std::string_view operator()(const rules::PartialOrder&) const { return "partial_order"; }
    std::string_view operator()(const rules::NegFreqDep&) const { return "neg_freq_dep"; }
    std::string_view operator()(const rules::PosFreqDep&) const { return "pos_freq_dep"; }
    std::string_view operator()(const rules::Bernstein&) const { return "bernstein"; }
  };
  return std::visit(Name{}, v_);
}

int ColouringRule::max_sample_size() const noexcept {
  if (std::holds_alternative<rules::Logistic>(v_)) return 2;
  if (const auto* b = std::get_if<rules::Bernstein>(&v_)) return std::max(b->degree, 1);
  return 0;
}

bool ColouringRule::accepts_sample_size(int k) const noexcept {
  if (k < 1) return false;
  if (const auto* b = std::get_if<rules::Bernstein>(&v_)) return k == 1 || k == b->degree;
  const int m = max_sample_size();
  return m == 0 || k <= m;
}

void colour_distribution(const ColouringRule& rule, std::span<const int> counts, std::span<double> out) {
  const std::size_t K = rule.K();
  if (counts.size() != K || out.size() != K) throw std::invalid_argument("sample counts must have length K");
  int k = 0;
  for (int c : counts) {
    if (c < 0) throw std::invalid_argument("sample counts must be nonnegative");
    k += c;
  }
  if (k < 1) throw std::invalid_argument("sample must contain at least one potential parent");
  std::fill(out.begin(), out.end(), 0.0);

  auto highest_present = [&] {
    std::size_t j = K;
    while (counts[--j] == 0) {}
    return j;
  };

  std::visit(
      [&](const auto& r) {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, rules::Neutral>) {
          for (std::size_t i = 0; i < K; ++i) out[i] = static_cast<double>(counts[i]) / k;
        } else if constexpr (std::is_same_v<R, rules::Transitive>) {
          out[highest_present()] = 1.0;
        } else if constexpr (std::is_same_v<R, rules::TransitiveWithMutation>) {
          const std::size_t j = highest_present();
          out[j] += 1.0 - r.mutation_prob;
          for (std::size_t l = 0; l < K; ++l) out[l] += r.mutation_prob * r.kernel[j * K + l];
        } else if constexpr (std::is_same_v<R, rules::Logistic>) {
          if (k > 2) throw std::domain_error("logistic rule only accepts samples of size 1 or 2");
          std::size_t a = K, b = K;
          for (std::size_t i = 0; i < K; ++i) {
            if (counts[i] == 0) continue;
            if (counts[i] == 2 || k == 1) { out[i] = 1.0; return; }
            (a == K ? a : b) = i;
          }
          out[a] = r.p[a * K + b];
          out[b] = r.p[b * K + a];
        } else if constexpr (std::is_same_v<R, rules::PartialOrder>) {
          int n_max = 0;
          for (std::size_t i = 0; i < K; ++i) {
            if (counts[i] == 0) continue;
            bool beaten = false;
            for (std::size_t j = 0; j < K && !beaten; ++j) beaten = counts[j] > 0 && r.beats[j * K + i];
            if (!beaten) { out[i] = 1.0; ++n_max; }
          }
          // A cycle among the present types leaves no maximal element; the
          // offspring is then uniform over the present types.
          if (n_max == 0)
            for (std::size_t i = 0; i < K; ++i)
              if (counts[i] > 0) { out[i] = 1.0; ++n_max; }
          for (auto& v : out) v /= n_max;
        } else if constexpr (std::is_same_v<R, rules::NegFreqDep> || std::is_same_v<R, rules::PosFreqDep>) {
          int best = std::is_same_v<R, rules::NegFreqDep> ? k + 1 : 0;
          for (int c : counts) {
            if (c == 0) continue;
            if constexpr (std::is_same_v<R, rules::NegFreqDep>) best = std::min(best, c);
            else best = std::max(best, c);
          }
          int ties = 0;
          for (std::size_t i = 0; i < K; ++i)
            if (counts[i] == best) { out[i] = 1.0; ++ties; }
          for (auto& v : out) v /= ties;
        } else if constexpr (std::is_same_v<R, rules::Bernstein>) {
          if (k == r.degree) {
            const std::size_t row = composition_rank(counts);
            for (std::size_t i = 0; i < K; ++i) out[i] = r.table[row * K + i];
          } else if (k == 1) {
            for (std::size_t i = 0; i < K; ++i) out[i] = counts[i];
          } else {
            throw std::domain_error("Bernstein rule of degree " + std::to_string(r.degree) +
                                    " does not accept samples of size " + std::to_string(k));
          }
        }
      },
      rule.variant());
}

std::vector<double> colour_distribution(const ColouringRule& rule, const SampleCounts& s) {
  std::vector<double> out(rule.K());
  colour_distribution(rule, s.counts, out);
  return out;
}

BernsteinRangeError::BernsteinRangeError(std::size_t component, std::vector<int> multi_index, double value)
    : std::invalid_argument("Bernstein coefficient of component " + std::to_string(component + 1) +
                            " at multi-index " + format_index(multi_index) + " is " +
                            std::to_string(value) + ", outside [0, 1]"),
      component_(component),
      multi_index_(std::move(multi_index)),
      value_(value) {}

ColouringRule bernstein_rule(const PolynomialMap& g) {
  const std::size_t K = g.K();
  const int n = std::max(g.degree(), 1);
  const std::size_t rows = composition_count(K, n);
  // Homogenise every monomial to degree n by multiplying with (sum x)^(n-d);
  // the coefficient of x^z is then binom(n; z) alpha_z.
  std::vector<double> h(rows * K, 0.0);
  std::vector<int> z(K);
  for (std::size_t i = 0; i < K; ++i) {
    for (const auto& m : g.components()[i]) {
      int d = 0;
      for (int e : m.exponents) d += e;
      for_each_composition(K, n - d, [&](const std::vector<int>& w) {
        for (std::size_t r = 0; r < K; ++r) z[r] = m.exponents[r] + w[r];
        h[composition_rank(z) * K + i] += m.coeff * multinomial_coefficient(w);
      });
    }
  }
  constexpr double tol = 1e-12;
  for_each_composition(K, n, [&](const std::vector<int>& zz) {
    const std::size_t row = composition_rank(zz);
    const double mc = multinomial_coefficient(zz);
    double sum = 0.0;
    for (std::size_t i = 0; i < K; ++i) {
      double a = h[row * K + i] / mc;
      if (a < -tol || a > 1.0 + tol) throw BernsteinRangeError(i, zz, a);
      a = std::clamp(a, 0.0, 1.0);
      h[row * K + i] = a;
      sum += a;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw std::invalid_argument("Bernstein coefficients at multi-index " + format_index(zz) +
                                  " sum to " + std::to_string(sum) + "; g must preserve sum(x) = 1");
  });
  return bernstein_rule_from_table(K, n, std::move(h));
}

ColouringRule bernstein_rule_from_table(std::size_t K, int degree, std::vector<double> table) {
  check_K(K);
  if (degree < 1) throw std::invalid_argument("Bernstein degree must be >= 1");
  const std::size_t rows = composition_count(K, degree);
  if (table.size() != rows * K) throw std::invalid_argument("Bernstein table has the wrong size");
  bool free = true;
  for_each_composition(K, degree, [&](const std::vector<int>& z) {
    const std::size_t row = composition_rank(z);
    double sum = 0.0;
    for (std::size_t i = 0; i < K; ++i) {
      const double a = table[row * K + i];
      if (!(a >= 0.0 && a <= 1.0)) throw BernsteinRangeError(i, z, a);
      sum += a;
      if (a > 0.0 && z[i] == 0) free = false;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw std::invalid_argument("Bernstein table row " + format_index(z) + " does not sum to 1");
  });
  return ColouringRule(K, rules::Bernstein{degree, std::move(table)}, free);
}

double bernstein_coefficient(const ColouringRule& rule, std::span<const int> z, std::size_t i) {
  const auto* b = std::get_if<rules::Bernstein>(&rule.variant());
  if (!b) throw std::invalid_argument("not a Bernstein rule");
  return b->table[composition_rank(z) * rule.K() + i];
}

PolynomialMap bernstein_polynomial(const ColouringRule& rule) {
  const auto* b = std::get_if<rules::Bernstein>(&rule.variant());
  if (!b) throw std::invalid_argument("not a Bernstein rule");
  const std::size_t K = rule.K();
  std::vector<std::vector<Monomial>> comps(K);
  for_each_composition(K, b->degree, [&](const std::vector<int>& z) {
    const std::size_t row = composition_rank(z);
    const double mc = multinomial_coefficient(z);
    for (std::size_t i = 0; i < K; ++i) {
      const double a = b->table[row * K + i];
      if (a != 0.0) comps[i].push_back({z, mc * a});
    }
  });
  return PolynomialMap(K, std::move(comps));
}

OffspringLaw bernstein_offspring_law(const ColouringRule& rule, double rho) {
  const auto* b = std::get_if<rules::Bernstein>(&rule.variant());
  if (!b) throw std::invalid_argument("not a Bernstein rule");
  if (b->degree == 1) return OffspringLaw::singleton();
  std::vector<double> tail(static_cast<std::size_t>(b->degree) + 1, 0.0);
  tail.back() = 1.0;
  return OffspringLaw(rho, std::move(tail));
}

std::vector<double> sample_size_type_prob(const ColouringRule& rule, int k, std::span<const double> x) {
  const std::size_t K = rule.K();
  if (x.size() != K) throw std::invalid_argument("frequency vector must have length K");
  std::vector<double> q(K, 0.0), c(K);
  for_each_composition(K, k, [&](const std::vector<int>& z) {
    double w = multinomial_coefficient(z);
    for (std::size_t r = 0; r < K && w != 0.0; ++r)
      if (z[r] != 0) w *= std::pow(x[r], z[r]);
    if (w == 0.0) return;
    colour_distribution(rule, z, c);
    for (std::size_t i = 0; i < K; ++i) q[i] += w * c[i];
  });
  return q;
}

std::size_t enumeration_terms(std::size_t K, const OffspringLaw& Q) {
  std::size_t terms = composition_count(K, 1);
  const int top = std::min(Q.max_size(), kExactEnumerationMaxSize);
  for (int k = 2; k <= top; ++k)
    if (Q.tail(k) > 0.0) terms += composition_count(K, k);
  return terms;
}

TypeProbabilities offspring_type_prob(const ColouringRule& rule, const OffspringLaw& Q,
                                      const SimplexPoint& x, std::uint64_t mc_seed) {
  const std::size_t K = rule.K();
  if (x.size() != K) throw std::invalid_argument("frequency vector must have length K");
  for (int k = 1; k <= Q.max_size(); ++k)
    if (Q.prob(k) > 0.0 && !rule.accepts_sample_size(k))
      throw std::domain_error(std::string(rule.kind_name()) + " rule does not accept samples of size " +
                              std::to_string(k));

  TypeProbabilities out{std::vector<double>(K, 0.0), std::vector<double>(K, 0.0), true};
  const int top = std::min(Q.max_size(), kExactEnumerationMaxSize);
  for (int k = 1; k <= top; ++k) {
    const double w = Q.prob(k);
    if (w == 0.0) continue;
    const auto q = sample_size_type_prob(rule, k, x.values());
    for (std::size_t i = 0; i < K; ++i) out.probs[i] += w * q[i];
  }

  double rest = 0.0;
  for (int k = kExactEnumerationMaxSize + 1; k <= Q.max_size(); ++k) rest += Q.tail(k);
  if (rest > 0.0) {
    out.exact = false;
    constexpr int samples = 1'000'000;
    std::vector<double> tail_rest(Q.tail_vector());
    for (int k = 0; k <= kExactEnumerationMaxSize && k < static_cast<int>(tail_rest.size()); ++k)
      tail_rest[static_cast<std::size_t>(k)] = 0.0;
    RngStream rng(mc_seed, 0);
    std::vector<double> sum(K, 0.0), sum2(K, 0.0), c(K);
    std::vector<int> counts(K);
    for (int s = 0; s < samples; ++s) {
      const auto k = static_cast<int>(rng.categorical(tail_rest));
      std::fill(counts.begin(), counts.end(), 0);
      for (int j = 0; j < k; ++j) ++counts[rng.categorical(x.values())];
      colour_distribution(rule, counts, c);
      for (std::size_t i = 0; i < K; ++i) {
        sum[i] += c[i];
        sum2[i] += c[i] * c[i];
      }
    }
    const double scale = Q.rho() * rest;
    for (std::size_t i = 0; i < K; ++i) {
      const double mean = sum[i] / samples;
      const double var = std::max(sum2[i] / samples - mean * mean, 0.0);
      out.probs[i] += scale * mean;
      out.std_errors[i] = scale * std::sqrt(var / (samples - 1));
    }
  }
  return out;
}

}  // namespace lwf
