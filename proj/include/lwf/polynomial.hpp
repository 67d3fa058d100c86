#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace lwf {

struct Monomial {
  std::vector<int> exponents;
  double coeff = 0.0;
};

/// Polynomial map g : R^K -> R^K in the monomial basis, one list of terms
/// per output component.
class PolynomialMap {
 public:
  PolynomialMap(std::size_t K, std::vector<std::vector<Monomial>> components);

  static PolynomialMap identity(std::size_t K);

  std::size_t K() const noexcept { return K_; }
  int degree() const noexcept { return degree_; }
  const std::vector<std::vector<Monomial>>& components() const noexcept { return components_; }

  std::vector<double> operator()(std::span<const double> x) const;
  void evaluate(std::span<const double> x, std::span<double> out) const;

 private:
  std::size_t K_;
  int degree_ = 0;
  std::vector<std::vector<Monomial>> components_;
};

}  // namespace lwf
