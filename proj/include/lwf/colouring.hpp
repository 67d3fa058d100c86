#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "lwf/offspring_law.hpp"
#include "lwf/polynomial.hpp"
#include "lwf/simplex.hpp"

namespace lwf {

/// Multiplicity of each type among the sampled potential parents.
struct SampleCounts {
  std::vector<int> counts;

  int total() const noexcept;
  /// Counts from an ordered list of 0-based type labels.
  static SampleCounts from_labels(std::size_t K, std::span<const int> labels);
};

namespace rules {
struct Neutral {};
struct Transitive {};
struct TransitiveWithMutation {
  double mutation_prob;
  std::vector<double> kernel;  // K x K row-stochastic, row-major
};
struct Logistic {
  std::vector<double> p;  // p[i*K + j]: probability that i transmits against j
};
struct PartialOrder {
  std::vector<char> beats;  // beats[i*K + j]: i beats j
};
struct NegFreqDep {};
struct PosFreqDep {};
struct Bernstein {
  int degree;
  std::vector<double> table;  // row composition_rank(z), column i: alpha^i_z
};
}  // namespace rules

/// Map from a sample of potential-parent types to the law of the offspring's
/// type. Every built-in rule is exchangeable, so a sample is summarised by
/// its SampleCounts.
class ColouringRule {
 public:
  using Variant = std::variant<rules::Neutral, rules::Transitive, rules::TransitiveWithMutation,
                               rules::Logistic, rules::PartialOrder, rules::NegFreqDep,
                               rules::PosFreqDep, rules::Bernstein>;

  static ColouringRule neutral(std::size_t K);
  static ColouringRule transitive(std::size_t K);
  static ColouringRule transitive_with_mutation(std::size_t K, double mutation_prob,
                                                std::vector<double> kernel);
  /// `p` is K x K row-major with p_ij + p_ji = 1 and p_ii = 1/2.
  static ColouringRule logistic(std::size_t K, std::vector<double> p);
  /// `edges` lists (winner, loser) pairs of 0-based labels; the relation must
  /// be antisymmetric.
  static ColouringRule partial_order(std::size_t K, const std::vector<std::pair<int, int>>& edges);
  /// Rock-paper-scissors: 2 beats 1, 3 beats 2, 1 beats 3 (1-based).
  static ColouringRule rps();
  static ColouringRule neg_freq_dep(std::size_t K);
  static ColouringRule pos_freq_dep(std::size_t K);

  std::size_t K() const noexcept { return K_; }
  const Variant& variant() const noexcept { return v_; }
  std::string_view kind_name() const noexcept;
  /// True if the offspring type is always one of the sampled types.
  bool mutation_free() const noexcept { return mutation_free_; }
  /// Largest sample size the rule accepts (0 = unbounded).
  int max_sample_size() const noexcept;
  /// Whether a sample of this size is accepted.
  bool accepts_sample_size(int k) const noexcept;

 private:
  friend ColouringRule bernstein_rule_from_table(std::size_t, int, std::vector<double>);
  ColouringRule(std::size_t K, Variant v, bool mutation_free)
      : K_(K), v_(std::move(v)), mutation_free_(mutation_free) {}

  std::size_t K_;
  Variant v_;
  bool mutation_free_;
};

/// Offspring type law given the sample. `out` must have size K.
void colour_distribution(const ColouringRule& rule, std::span<const int> counts, std::span<double> out);
std::vector<double> colour_distribution(const ColouringRule& rule, const SampleCounts& s);

/// Thrown when a polynomial's Bernstein coefficients leave [0, 1].
class BernsteinRangeError : public std::invalid_argument {
 public:
  BernsteinRangeError(std::size_t component, std::vector<int> multi_index, double value);
  std::size_t component() const noexcept { return component_; }
  const std::vector<int>& multi_index() const noexcept { return multi_index_; }
  double value() const noexcept { return value_; }

 private:
  std::size_t component_;
  std::vector<int> multi_index_;
  double value_;
};

/// Colouring rule c_z(i) = alpha^i_z from the degree-n Bernstein coefficients
/// of g; n is the smallest degree covering every component.
ColouringRule bernstein_rule(const PolynomialMap& g);
/// Direct construction from a table laid out as rules::Bernstein::table.
ColouringRule bernstein_rule_from_table(std::size_t K, int degree, std::vector<double> table);
/// alpha^i_z for composition z.
double bernstein_coefficient(const ColouringRule& rule, std::span<const int> z, std::size_t i);
/// g(x) = sum_z binom(n; z) alpha_z x^z in the monomial basis.
PolynomialMap bernstein_polynomial(const ColouringRule& rule);
/// Q_N = (1 - rho) delta_1 + rho delta_n for a degree-n Bernstein rule.
OffspringLaw bernstein_offspring_law(const ColouringRule& rule, double rho);

inline constexpr int kExactEnumerationMaxSize = 12;

struct TypeProbabilities {
  std::vector<double> probs;
  std::vector<double> std_errors;  // zero when exact
  bool exact = true;
};

/// p^N(x): law of an offspring's type given the parental frequencies x.
/// Sample sizes up to kExactEnumerationMaxSize are enumerated exactly; the
/// remaining tail mass is estimated with 10^6 Monte Carlo samples.
TypeProbabilities offspring_type_prob(const ColouringRule& rule, const OffspringLaw& Q,
                                      const SimplexPoint& x, std::uint64_t mc_seed = 0);

/// q_k(x): type law for a sample of exactly k potential parents (exact).
std::vector<double> sample_size_type_prob(const ColouringRule& rule, int k, std::span<const double> x);

/// Number of terms the exact enumeration of p^N(x) visits.
std::size_t enumeration_terms(std::size_t K, const OffspringLaw& Q);

}  // namespace lwf
