#include "lwf/simplex.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace lwf {

SimplexPoint::SimplexPoint(std::vector<double> freqs) : freqs_(std::move(freqs)) {
  if (freqs_.size() < 2) throw std::invalid_argument("simplex point needs K >= 2 coordinates");
  double sum = 0.0;
  for (double v : freqs_) {
    if (!(v >= 0.0 && v <= 1.0))
      throw std::invalid_argument("simplex coordinate outside [0,1]: " + std::to_string(v));
    sum += v;
  }
  if (std::abs(sum - 1.0) > kSimplexTolerance)
    throw std::invalid_argument("simplex coordinates sum to " + std::to_string(sum));
}

SimplexPoint SimplexPoint::vertex(std::size_t K, std::size_t i) {
  if (K < 2 || i >= K) throw std::invalid_argument("bad vertex index");
  std::vector<double> v(K, 0.0);
  v[i] = 1.0;
  return SimplexPoint(std::move(v), Unchecked{});
}

SimplexPoint SimplexPoint::uniform(std::size_t K) {
  if (K < 2) throw std::invalid_argument("simplex point needs K >= 2 coordinates");
  return SimplexPoint(std::vector<double>(K, 1.0 / static_cast<double>(K)), Unchecked{});
}

SimplexPoint SimplexPoint::project(std::vector<double> v) {
  if (v.size() < 2) throw std::invalid_argument("simplex point needs K >= 2 coordinates");
  double sum = 0.0;
  for (double& c : v) {
    if (!(c > 0.0)) c = 0.0;
    sum += c;
  }
  if (!(sum > 0.0)) throw std::invalid_argument("cannot project the zero vector onto the simplex");
  for (double& c : v) c /= sum;
  return SimplexPoint(std::move(v), Unchecked{});
}

std::optional<std::size_t> SimplexPoint::fixed_allele() const noexcept {
  std::optional<std::size_t> found;
  for (std::size_t i = 0; i < freqs_.size(); ++i) {
    if (freqs_[i] > 0.0) {
      if (found) return std::nullopt;
      found = i;
    }
  }
  return found;
}

std::size_t SimplexPoint::support_size() const noexcept {
  std::size_t n = 0;
  for (double v : freqs_) n += v > 0.0;
  return n;
}

bool project_to_simplex(std::span<double> v) noexcept {
  bool clamped = false;
  double sum = 0.0;
  for (double& c : v) {
    if (!(c > 0.0)) {
      clamped |= c != 0.0;
      c = 0.0;
    }
    sum += c;
  }
  if (clamped || std::abs(sum - 1.0) > 1e-14) {
    for (double& c : v) c /= sum;
  }
  return clamped;
}

SimplexPoint sample_simplex(std::size_t K, RngStream& rng, double floor) {
  if (floor * static_cast<double>(K) >= 1.0)
    throw std::invalid_argument("simplex floor leaves no admissible points");
  std::vector<double> v(K);
  for (;;) {
    double sum = 0.0;
    for (double& c : v) {
      c = -std::log(rng.uniform_open());
      sum += c;
    }
    bool ok = true;
    for (double& c : v) {
      c /= sum;
      ok &= c >= floor;
    }
    if (ok) return SimplexPoint::project(v);
  }
}

}  // namespace lwf
