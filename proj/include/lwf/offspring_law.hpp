#pragma once

#include <map>
#include <vector>

#include "lwf/rng.hpp"

namespace lwf {

/// Law Q_N of the number of potential parents: Q({1}) = 1 - rho and
/// Q({k}) = rho * tail(k) for k >= 2.
class OffspringLaw {
 public:
  OffspringLaw() = default;
  /// `tail[k]` is the conditional probability of k potential parents given
  /// more than one; entries 0 and 1 must be zero. May be empty when rho = 0.
  OffspringLaw(double rho, std::vector<double> tail);

  static OffspringLaw from_tail(double rho, const std::map<int, double>& tail);
  static OffspringLaw singleton() { return {}; }

  double rho() const noexcept { return rho_; }
  double prob(int k) const noexcept;
  double tail(int k) const noexcept;
  const std::vector<double>& tail_vector() const noexcept { return tail_; }
  int max_size() const noexcept;
  /// beta = sum_k (k-1) tail(k): mean number of extra potential parents.
  double beta() const noexcept;

  int sample(RngStream& rng) const;
  /// Draw from the tail alone (the law conditioned on K_v > 1).
  int sample_tail(RngStream& rng) const;

 private:
  double rho_ = 0.0;
  std::vector<double> tail_;
};

/// Validates and densifies a sample-size tail given as {size: prob}.
std::vector<double> make_tail(const std::map<int, double>& tail);

}  // namespace lwf
