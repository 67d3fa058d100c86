#include "lwf/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lwf {

PolynomialMap::PolynomialMap(std::size_t K, std::vector<std::vector<Monomial>> components)
    : K_(K), components_(std::move(components)) {
  if (K < 2) throw std::invalid_argument("polynomial map needs K >= 2");
  if (components_.size() != K) throw std::invalid_argument("polynomial map needs one component per type");
  for (const auto& terms : components_) {
    for (const auto& m : terms) {
      if (m.exponents.size() != K) throw std::invalid_argument("monomial exponent vector must have length K");
      int d = 0;
      for (int e : m.exponents) {
        if (e < 0) throw std::invalid_argument("monomial exponents must be nonnegative");
        d += e;
      }
      degree_ = std::max(degree_, d);
    }
  }
}

PolynomialMap PolynomialMap::identity(std::size_t K) {
  std::vector<std::vector<Monomial>> comps(K);
  for (std::size_t i = 0; i < K; ++i) {
    Monomial m{std::vector<int>(K, 0), 1.0};
    m.exponents[i] = 1;
    comps[i].push_back(std::move(m));
  }
  return PolynomialMap(K, std::move(comps));
}

std::vector<double> PolynomialMap::operator()(std::span<const double> x) const {
  std::vector<double> out(K_);
  evaluate(x, out);
  return out;
}

void PolynomialMap::evaluate(std::span<const double> x, std::span<double> out) const {
  if (x.size() != K_ || out.size() != K_) throw std::invalid_argument("polynomial map dimension mismatch");
  for (std::size_t i = 0; i < K_; ++i) {
    double s = 0.0;
    for (const auto& m : components_[i]) {
      double term = m.coeff;
      for (std::size_t r = 0; r < K_; ++r)
        if (m.exponents[r] != 0) term *= std::pow(x[r], m.exponents[r]);
      s += term;
    }
    out[i] = s;
  }
}

}  // namespace lwf
