#include "lwf/offspring_law.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lwf {

std::vector<double> make_tail(const std::map<int, double>& tail) {
  if (tail.empty()) return {};
  std::vector<double> out(static_cast<std::size_t>(tail.rbegin()->first) + 1, 0.0);
  for (const auto& [k, p] : tail) {
    if (k < 2) throw std::invalid_argument("offspring tail is indexed by sample sizes >= 2, got " + std::to_string(k));
    if (!(p >= 0.0)) throw std::invalid_argument("offspring tail probabilities must be nonnegative");
    out[static_cast<std::size_t>(k)] = p;
  }
  return out;
}

OffspringLaw::OffspringLaw(double rho, std::vector<double> tail) : rho_(rho), tail_(std::move(tail)) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("rho must be in [0,1]");
  while (!tail_.empty() && tail_.back() == 0.0) tail_.pop_back();
  double sum = 0.0;
  for (std::size_t k = 0; k < tail_.size(); ++k) {
    if (k < 2 && tail_[k] != 0.0) throw std::invalid_argument("offspring tail must vanish below size 2");
    if (!(tail_[k] >= 0.0)) throw std::invalid_argument("offspring tail probabilities must be nonnegative");
    sum += tail_[k];
  }
  if (tail_.empty()) {
    if (rho_ > 0.0) throw std::invalid_argument("rho > 0 needs a nonempty offspring tail");
    return;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("offspring tail must sum to 1");
}

OffspringLaw OffspringLaw::from_tail(double rho, const std::map<int, double>& tail) {
  return OffspringLaw(rho, make_tail(tail));
}

double OffspringLaw::tail(int k) const noexcept {
  return k >= 0 && static_cast<std::size_t>(k) < tail_.size() ? tail_[static_cast<std::size_t>(k)] : 0.0;
}

double OffspringLaw::prob(int k) const noexcept {
  if (k == 1) return 1.0 - rho_;
  return rho_ * tail(k);
}

int OffspringLaw::max_size() const noexcept {
  return tail_.empty() || rho_ == 0.0 ? 1 : static_cast<int>(tail_.size()) - 1;
}

double OffspringLaw::beta() const noexcept {
  double b = 0.0;
  for (std::size_t k = 2; k < tail_.size(); ++k) b += static_cast<double>(k - 1) * tail_[k];
  return b;
}

int OffspringLaw::sample(RngStream& rng) const {
  if (rho_ == 0.0 || rng.uniform() >= rho_) return 1;
  return sample_tail(rng);
}

int OffspringLaw::sample_tail(RngStream& rng) const {
  if (tail_.empty()) throw std::logic_error("offspring law has no tail to sample");
  return static_cast<int>(rng.categorical(tail_));
}

}  // namespace lwf
