#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "lwf/rng.hpp"

namespace lwf {

inline constexpr double kSimplexTolerance = 1e-12;

/// Frequency vector over K >= 2 allele types, living on the face sum(x) = 1.
class SimplexPoint {
 public:
  /// Throws std::invalid_argument unless K >= 2, every coordinate is in
  /// [0, 1] and the coordinates sum to 1 within kSimplexTolerance.
  explicit SimplexPoint(std::vector<double> freqs);

  static SimplexPoint vertex(std::size_t K, std::size_t i);
  static SimplexPoint uniform(std::size_t K);
  /// Clamps negative coordinates to zero and rescales to sum one.
  static SimplexPoint project(std::vector<double> v);

  std::size_t size() const noexcept { return freqs_.size(); }
  double operator[](std::size_t i) const { return freqs_[i]; }
  std::span<const double> values() const noexcept { return freqs_; }
  const std::vector<double>& vector() const noexcept { return freqs_; }

  /// Index of the allele at frequency one, if the point is a vertex.
  std::optional<std::size_t> fixed_allele() const noexcept;
  std::size_t support_size() const noexcept;

  friend bool operator==(const SimplexPoint&, const SimplexPoint&) = default;

 private:
  struct Unchecked {};
  SimplexPoint(std::vector<double> freqs, Unchecked) : freqs_(std::move(freqs)) {}

  std::vector<double> freqs_;
};

/// In-place clamp-and-renormalize; returns true if any coordinate was clamped.
bool project_to_simplex(std::span<double> v) noexcept;

/// Uniform (flat Dirichlet) point, resampled until min coordinate >= floor.
SimplexPoint sample_simplex(std::size_t K, RngStream& rng, double floor = 0.0);

}  // namespace lwf
