#include "lwf/combinatorics.hpp"

#include <cmath>
#include <stdexcept>

namespace lwf {
namespace {

std::size_t choose(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

std::size_t composition_count(std::size_t K, int n) {
  if (K == 0 || n < 0) return 0;
  return choose(static_cast<std::size_t>(n) + K - 1, K - 1);
}

std::size_t composition_rank(std::span<const int> z) {
  const std::size_t K = z.size();
  int remaining = 0;
  for (int v : z) {
    if (v < 0) throw std::invalid_argument("composition entries must be nonnegative");
    remaining += v;
  }
  std::size_t rank = 0;
  for (std::size_t i = 0; i + 1 < K; ++i) {
    for (int v = 0; v < z[i]; ++v) rank += composition_count(K - i - 1, remaining - v);
    remaining -= z[i];
  }
  return rank;
}

double multinomial_coefficient(std::span<const int> z) {
  // Product of binomials: exact in double while the result fits 53 bits.
  double c = 1.0;
  int n = 0;
  for (int v : z) {
    for (int j = 1; j <= v; ++j) c = c * static_cast<double>(n + j) / static_cast<double>(j);
    n += v;
  }
  return std::round(c);
}

}  // namespace lwf
