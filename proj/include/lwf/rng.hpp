#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string_view>

namespace lwf {

/// Counter-based random stream (Philox4x32-10).
///
/// The 64-bit seed is the Philox key and the 64-bit stream id occupies the
/// upper half of the 128-bit counter, so each (seed, stream) pair addresses
/// its own sequence of 2^64 blocks. Replicate r of an experiment always uses
/// stream r; which thread runs it does not matter.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t stream) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept;

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Uniform on (0, 1).
  double uniform_open() noexcept;
  double normal();
  double exponential(double rate);
  std::uint64_t poisson(double mean);
  std::int64_t binomial(std::int64_t trials, double p);
  /// Index drawn proportionally to `weights` (need not be normalized).
  std::size_t categorical(std::span<const double> weights) noexcept;

  /// Skips `blocks` Philox blocks (two 64-bit outputs each).
  void discard(std::uint64_t blocks) noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

 private:
  void refill() noexcept;

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> out_{};
  unsigned next_ = 2;
  std::normal_distribution<double> normal_;
};

/// Mixes a tag into a seed so independent parts of one experiment (e.g. the
/// SDE side and the ancestral side of a duality check) never share streams.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag) noexcept;

}  // namespace lwf
