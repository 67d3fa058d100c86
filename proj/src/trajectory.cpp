#include "lwf/trajectory.hpp"

#include <ostream>
#include <stdexcept>

namespace lwf {

void Trajectory::push(double t, SimplexPoint x) {
  times.push_back(t);
  states.push_back(std::move(x));
}

void write_csv_header(std::ostream& os, std::size_t K) {
  os << 't';
  for (std::size_t i = 1; i <= K; ++i) os << ",x_" << i;
  os << ",replicate\n";
}

void write_csv_rows(std::ostream& os, const Trajectory& tr, std::size_t replicate) {
  if (tr.times.size() != tr.states.size()) throw std::logic_error("trajectory times and states differ in length");
  const auto old = os.precision(17);
  for (std::size_t r = 0; r < tr.size(); ++r) {
    os << tr.times[r];
    for (double v : tr.states[r].values()) os << ',' << v;
    os << ',' << replicate << '\n';
  }
  os.precision(old);
}

void write_csv(std::ostream& os, const std::vector<Trajectory>& replicates) {
  if (replicates.empty()) return;
  write_csv_header(os, replicates.front().states.front().size());
  for (std::size_t r = 0; r < replicates.size(); ++r) write_csv_rows(os, replicates[r], r);
}

}  // namespace lwf
