#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace lwf {

/// Number of compositions of n into K nonnegative parts, C(n+K-1, K-1).
std::size_t composition_count(std::size_t K, int n);

/// Position of z (a composition of sum(z)) in the order produced by
/// for_each_composition: lexicographic, first coordinate varying slowest.
std::size_t composition_rank(std::span<const int> z);

/// Multinomial coefficient n! / (z_1! ... z_K!) as a double.
double multinomial_coefficient(std::span<const int> z);

/// Visits every composition of n into K parts in rank order.
template <class F>
void for_each_composition(std::size_t K, int n, F&& visit) {
  if (K == 0 || n < 0) return;
  std::vector<int> z(K, 0);
  z[K - 1] = n;
  for (;;) {
    visit(static_cast<const std::vector<int>&>(z));
    if (K == 1) return;
    // Odometer over the first K-1 coordinates; the last one takes the remainder.
    std::ptrdiff_t i = static_cast<std::ptrdiff_t>(K) - 2;
    int prefix = n - z[K - 1];
    while (i >= 0 && prefix == n) {
      prefix -= z[static_cast<std::size_t>(i)];
      --i;
    }
    if (i < 0) return;
    ++z[static_cast<std::size_t>(i)];
    for (std::size_t j = static_cast<std::size_t>(i) + 1; j + 1 < K; ++j) z[j] = 0;
    z[K - 1] = n - prefix - 1;
  }
}

}  // namespace lwf
