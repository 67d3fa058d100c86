#pragma once

#include <iosfwd>
#include <vector>

#include "lwf/simplex.hpp"

namespace lwf {

/// Recorded states of one replicate. Times are generation indices for the
/// discrete model and real times for the SDE.
struct Trajectory {
  std::vector<double> times;
  std::vector<SimplexPoint> states;

  void push(double t, SimplexPoint x);
  std::size_t size() const noexcept { return states.size(); }
  const SimplexPoint& back() const { return states.back(); }
};

/// CSV header `t,x_1,...,x_K,replicate`.
void write_csv_header(std::ostream& os, std::size_t K);
void write_csv_rows(std::ostream& os, const Trajectory& tr, std::size_t replicate);
void write_csv(std::ostream& os, const std::vector<Trajectory>& replicates);

}  // namespace lwf
