#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "lwf/lambda_measure.hpp"
#include "lwf/offspring_law.hpp"

namespace lwf {

/// gamma_N would exceed one for every admissible rho_N.
class InfeasibleSchedule : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Finite-N parameters tied to the limit (kappa, sigma, Lambda):
///   rho_N = kappa / (sigma N)        if sigma > 0,
///   rho_N = N^-b, 2 alpha < b < 1    if sigma = 0,
///   gamma_N = Lambda^alpha_N([0,1]) rho_N / kappa,
/// with Lambda^alpha_N(dz) = Lambda(dz)/z^2 restricted to z >= N^-alpha.
class ScalingSchedule {
 public:
  long N() const noexcept { return N_; }
  double alpha() const noexcept { return alpha_; }
  double kappa() const noexcept { return kappa_; }
  double sigma() const noexcept { return sigma_; }
  /// Exponent used for rho_N when sigma = 0 (NaN otherwise).
  double b_exponent() const noexcept { return b_; }
  double rho() const noexcept { return rho_; }
  double gamma() const noexcept { return gamma_; }
  bool gamma_clamped() const noexcept { return gamma_clamped_; }
  double truncation() const noexcept { return extreme_.cutoff(); }
  double lambda_alpha_mass() const noexcept { return extreme_.rate(); }
  const LambdaMeasure& lambda() const noexcept { return lambda_; }
  /// Normalised truncated law (Lambda-hat^alpha_N) of extreme-event sizes.
  const TruncatedJumpLaw& extreme_size_law() const noexcept { return extreme_; }
  const OffspringLaw& offspring_law() const noexcept { return offspring_; }

  /// Same schedule with extreme events switched off.
  ScalingSchedule without_extreme_events() const;

 private:
  friend ScalingSchedule make_schedule(long, double, double, double, const LambdaMeasure&,
                                       std::vector<double>, std::optional<double>);
  long N_ = 0;
  double alpha_ = 0.0, kappa_ = 0.0, sigma_ = 0.0, b_ = 0.0;
  double rho_ = 0.0, gamma_ = 0.0;
  bool gamma_clamped_ = false;
  LambdaMeasure lambda_;
  TruncatedJumpLaw extreme_;
  OffspringLaw offspring_;
};

/// `tail` is the sample-size law conditioned on K_v > 1 (index = size).
/// `b` overrides the sigma = 0 exponent (default (2 alpha + 1) / 2).
ScalingSchedule make_schedule(long N, double alpha, double kappa, double sigma,
                              const LambdaMeasure& L, std::vector<double> tail,
                              std::optional<double> b = std::nullopt);

}  // namespace lwf
