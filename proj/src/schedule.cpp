#include "lwf/schedule.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace lwf {

ScalingSchedule make_schedule(long N, double alpha, double kappa, double sigma,
                              const LambdaMeasure& L, std::vector<double> tail,
                              std::optional<double> b) {
  if (N < 2) throw std::invalid_argument("population size N must be >= 2");
  if (!(alpha > 0.0 && alpha < 0.5)) throw std::invalid_argument("alpha must be in (0, 1/2)");
  if (!(kappa > 0.0)) throw std::invalid_argument("kappa must be positive");
  if (!(sigma >= 0.0)) throw std::invalid_argument("sigma must be nonnegative");

  ScalingSchedule s;
  s.N_ = N;
  s.alpha_ = alpha;
  s.kappa_ = kappa;
  s.sigma_ = sigma;
  s.lambda_ = L;
  const double n = static_cast<double>(N);

  if (sigma > 0.0) {
    if (b) throw std::invalid_argument("the rho exponent b only applies when sigma = 0");
    s.b_ = std::numeric_limits<double>::quiet_NaN();
    s.rho_ = kappa / (sigma * n);
    if (s.rho_ > 1.0)
      throw InfeasibleSchedule("rho_N = kappa/(sigma N) exceeds 1; increase N or sigma");
  } else {
    s.b_ = b.value_or((2.0 * alpha + 1.0) / 2.0);
    if (!(s.b_ > 2.0 * alpha && s.b_ < 1.0))
      throw std::invalid_argument("rho exponent b must lie in (2 alpha, 1)");
    s.rho_ = std::pow(n, -s.b_);
  }

  s.extreme_ = TruncatedJumpLaw(L, std::pow(n, -alpha));
  const double mass = s.extreme_.rate();
  const double gamma = mass * s.rho_ / kappa;
  if (gamma > 1.0) {
    // Smallest admissible rho: fixed when sigma > 0, approaching 1/N otherwise.
    const double rho_min = sigma > 0.0 ? s.rho_ : 1.0 / n;
    if (mass * rho_min / kappa > 1.0)
      throw InfeasibleSchedule("N too small for this Lambda: gamma_N = " + std::to_string(gamma) +
                               " > 1");
    s.gamma_ = 1.0;
    s.gamma_clamped_ = true;
  } else {
    s.gamma_ = gamma;
  }
  s.offspring_ = OffspringLaw(s.rho_, std::move(tail));
  return s;
}

ScalingSchedule ScalingSchedule::without_extreme_events() const {
  ScalingSchedule copy = *this;
  copy.gamma_ = 0.0;
  copy.gamma_clamped_ = false;
  return copy;
}

}  // namespace lwf
