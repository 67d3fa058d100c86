#pragma once

#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "lwf/colouring.hpp"
#include "lwf/offspring_law.hpp"
#include "lwf/polynomial.hpp"

namespace lwf {

// Closed-form limit drifts. Vectors are indexed 0..K-1; `pi` is indexed by
// the branching increment (pi[k] for k >= 1, pi[0] ignored).
std::vector<double> mu_transitive(double kappa, std::span<const double> pi, std::span<const double> x);
std::vector<double> mu_logistic(double kappa, std::span<const double> p, std::span<const double> x);
/// Type i beats its cyclic predecessor: mu_i = kappa x_i (x_{i-1} - x_{i+1}).
std::vector<double> mu_rps(double kappa, std::span<const double> x);
/// beats[i*K + j] != 0 means i beats j; unrelated pairs split 1/2.
std::vector<double> mu_food_web(double kappa, std::span<const char> beats, std::span<const double> x);
std::vector<double> mu_negfreq(double kappa, std::span<const double> x);
std::vector<double> mu_posfreq(double kappa, std::span<const double> x);
std::vector<double> mu_from_polynomial(double lambda, const PolynomialMap& g, std::span<const double> x);

/// Logistic matrix induced by a dominance relation (1, 0, or 1/2 for unrelated types).
std::vector<double> food_web_matrix(std::size_t K, std::span<const char> beats);

namespace drifts {
struct Neutral {};
struct Transitive {
  double kappa;
  std::vector<double> pi;
};
struct Logistic {
  double kappa;
  std::vector<double> p;
};
struct Rps {
  double kappa;
};
struct FoodWeb {
  double kappa;
  std::vector<char> beats;
};
struct NegFreqDep {
  double kappa;
};
struct PosFreqDep {
  double kappa;
};
struct FromPolynomial {
  double lambda;
  PolynomialMap g;
};
/// kappa (q(x) - x) with q the exact type law under a given rule and
/// sample-size tail; covers pairings without a closed form.
struct RuleExpectation {
  double kappa;
  ColouringRule rule;
  OffspringLaw tail;
};
}  // namespace drifts

class DriftFunction {
 public:
  using Variant = std::variant<drifts::Neutral, drifts::Transitive, drifts::Logistic, drifts::Rps,
                               drifts::FoodWeb, drifts::NegFreqDep, drifts::PosFreqDep,
                               drifts::FromPolynomial, drifts::RuleExpectation>;

  DriftFunction(std::size_t K, Variant v);

  static DriftFunction neutral(std::size_t K) { return {K, drifts::Neutral{}}; }

  std::size_t K() const noexcept { return K_; }
  const Variant& variant() const noexcept { return v_; }
  std::string_view kind_name() const noexcept;
  bool is_neutral() const noexcept { return std::holds_alternative<drifts::Neutral>(v_); }
  /// mu_i(x) = 0 whenever x_i = 0.
  bool mutation_free() const noexcept { return mutation_free_; }

  std::vector<double> operator()(std::span<const double> x) const;
  void evaluate(std::span<const double> x, std::span<double> out) const;

 private:
  std::size_t K_;
  Variant v_;
  bool mutation_free_ = true;
};

/// Limit drift of the discrete model with this rule and sample-size tail,
/// in closed form where one exists.
DriftFunction drift_for_rule(const ColouringRule& rule, const OffspringLaw& tail, double kappa);

/// s_i(x) = mu_i(x) / (x_i (1 - x_i)); NaN where x_i is 0 or 1.
double selection_coefficient(const DriftFunction& mu, std::span<const double> x, std::size_t i);

}  // namespace lwf
