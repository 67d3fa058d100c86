#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace lwf::stats {

inline constexpr double kZ99TwoSided = 2.5758293035489004;
inline constexpr double kZ99OneSided = 2.3263478740408408;
/// Asymptotic 95% critical value of the Kolmogorov-Smirnov statistic scaled by sqrt(n).
inline constexpr double kKsCritical95 = 1.358;

struct MeanSe {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

MeanSe mean_se(std::span<const double> v);

/// Two-sample Kolmogorov-Smirnov distance sup |F_a - F_b|.
double ks_distance(std::vector<double> a, std::vector<double> b);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v) const noexcept { return v >= lo && v <= hi; }
};

/// Wilson score interval for a binomial proportion.
Interval wilson_interval(std::size_t successes, std::size_t trials, double z = kZ99TwoSided);

struct Slope {
  double slope = 0.0;
  double intercept = 0.0;
  double std_error = 0.0;  // classical OLS standard error (needs >= 3 points)
};

Slope ols_slope(std::span<const double> x, std::span<const double> y);

/// Least-squares nonincreasing fit (pool adjacent violators).
std::vector<double> antitonic_fit(std::span<const double> y, std::span<const double> w = {});
/// Least-squares nondecreasing fit.
std::vector<double> isotonic_fit(std::span<const double> y, std::span<const double> w = {});

}  // namespace lwf::stats
