#pragma once

#include <cstddef>
#include <exception>
#include <optional>
#include <type_traits>
#include <vector>

#include <omp.h>

namespace lwf {

struct Execution {
  /// Worker threads; <= 0 means the OpenMP default.
  int threads = 1;
};

inline int resolve_threads(const Execution& ex) noexcept {
  return ex.threads > 0 ? ex.threads : omp_get_max_threads();
}

/// Runs kernel(0), ..., kernel(count - 1) and returns the results in index
/// order. The kernel must derive all randomness from its index (e.g.
/// RngStream(seed, index)), which makes the output independent of the thread
/// count. The first failing index's exception is rethrown after the loop.
template <class Kernel>
auto run_replicates(std::size_t count, Kernel&& kernel, const Execution& ex = {})
    -> std::vector<std::invoke_result_t<Kernel&, std::size_t>> {
  using T = std::invoke_result_t<Kernel&, std::size_t>;
  std::vector<std::optional<T>> slots(count);
  std::vector<std::exception_ptr> errors(count);
  const auto n = static_cast<long long>(count);
  const int threads = resolve_threads(ex);

#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (long long r = 0; r < n; ++r) {
    const auto i = static_cast<std::size_t>(r);
    try {
      slots[i].emplace(kernel(i));
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }

  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<T> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

/// Single-threaded reference for run_replicates.
template <class Kernel>
auto run_replicates_serial(std::size_t count, Kernel&& kernel)
    -> std::vector<std::invoke_result_t<Kernel&, std::size_t>> {
  std::vector<std::invoke_result_t<Kernel&, std::size_t>> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(kernel(i));
  return out;
}

}  // namespace lwf
