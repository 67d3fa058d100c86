#pragma once

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "lwf/rng.hpp"

namespace lwf {

namespace measure {
struct Zero {};
struct PointMass {
  double z0;
  double mass;
};
/// mass times the Beta(a, b) probability law.
struct BetaLaw {
  double a;
  double b;
  double mass;
};
/// mass times Lebesgue measure on [0, 1].
struct UniformLaw {
  double mass;
};
struct Atom {
  double z;
  double weight;
};
struct FiniteAtoms {
  std::vector<Atom> atoms;
};
}  // namespace measure

/// Finite measure on (0, 1] driving extreme reproductive events and the jump
/// part of the limit. A Kingman component (atom at 0) is not representable;
/// binary resampling is carried by sigma instead.
class LambdaMeasure {
 public:
  using Variant = std::variant<measure::Zero, measure::PointMass, measure::BetaLaw,
                               measure::UniformLaw, measure::FiniteAtoms>;

  LambdaMeasure() = default;

  static LambdaMeasure zero() { return {}; }
  static LambdaMeasure point_mass(double z0, double mass);
  static LambdaMeasure beta(double a, double b, double mass);
  static LambdaMeasure uniform(double mass);
  static LambdaMeasure atoms(std::vector<measure::Atom> atoms);

  const Variant& variant() const noexcept { return v_; }
  bool is_zero() const noexcept;
  bool has_density() const noexcept;
  /// Atoms of PointMass / FiniteAtoms measures (empty otherwise).
  std::vector<measure::Atom> atom_list() const;
  /// Density with respect to Lebesgue measure (BetaLaw / UniformLaw only).
  double density(double y, double one_minus_y) const;
  /// Beta shape parameters of a density variant (UniformLaw is Beta(1,1)).
  std::pair<double, double> beta_shape() const;
  double mass_at_one() const;
  std::string describe() const;

 private:
  explicit LambdaMeasure(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

double lambda_total_mass(const LambdaMeasure& L);

/// lambda_{n,k} = integral of y^(k-2) (1-y)^(n-k) Lambda(dy), 2 <= k <= n.
/// Closed forms for every variant.
double lambda_nk(const LambdaMeasure& L, long n, long k);

/// Same quantity by direct integration against the measure (quadrature for
/// densities, summation for atoms). Independent of the closed forms.
double lambda_nk_quadrature(const LambdaMeasure& L, long n, long k);

/// binom(n, k) * lambda_{n,k}, evaluated in log space so it stays finite for
/// large n.
double collision_rate(const LambdaMeasure& L, long n, long k);

/// Integral of f(y, 1-y) against Lambda over [lo, hi]. For densities,
/// `power_at_zero` is the exponent of the f-factor's behaviour at 0 (used to
/// regularise the quadrature); atoms are summed.
double integrate_measure(const LambdaMeasure& L, const std::function<double(double, double)>& f,
                         double lo, double hi, double power_at_zero = 0.0,
                         double power_at_one = 0.0);

/// (1/beta) * integral |log(1-y)| Lambda(dy)/y^2; +infinity when the
/// integral diverges (an atom at 1, or a density with a <= 1).
double kappa_star(const LambdaMeasure& L, double beta);

/// The same integral with log(1-y) as printed, i.e. -kappa_star.
double kappa_star_as_printed(const LambdaMeasure& L, double beta);

/// Law of z under Lambda(dz)/z^2 restricted to [cutoff, 1]. Used both for
/// the extreme-event size (cutoff N^-alpha) and the SDE jump sizes.
class TruncatedJumpLaw {
 public:
  TruncatedJumpLaw() = default;
  TruncatedJumpLaw(const LambdaMeasure& L, double cutoff);

  /// Total mass of Lambda(dz)/z^2 on [cutoff, 1].
  double rate() const noexcept { return rate_; }
  double cutoff() const noexcept { return cutoff_; }
  /// Lambda([0, cutoff)): the part of the measure the truncation drops.
  double excluded_mass() const noexcept { return excluded_; }
  double sample(RngStream& rng) const;

 private:
  double sample_density(RngStream& rng) const;

  LambdaMeasure measure_;
  double cutoff_ = 0.0;
  double rate_ = 0.0;
  double excluded_ = 0.0;
  std::vector<measure::Atom> atoms_;  // weight already divided by z^2
  // Density variants: y^(a-3) (1-y)^(b-1) split at split_.
  double a_ = 0.0, b_ = 0.0, split_ = 0.0, low_weight_ = 0.0, high_weight_ = 0.0;
};

}  // namespace lwf
