#include "lwf/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <vector>

namespace lwf {
namespace {

constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the nodes kKronrodNodes[1], [3], [5], [7].
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment kronrod(const std::function<double(double)>& f, double a, double b) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(centre);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const double pair = f(centre - dx) + f(centre + dx);
    kronrod += kKronrodWeights[j] * pair;
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * pair;
  }
  return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    double rel_tol, double abs_tol, int max_intervals) {
  QuadratureResult out;
  if (a == b) {
    out.converged = true;
    return out;
  }
  std::priority_queue<Segment> heap;
  Segment first = kronrod(f, a, b);
  heap.push(first);
  double value = first.value;
  double error = first.error;
  int count = 1;
  while (error > std::max(abs_tol, rel_tol * std::abs(value)) && count < max_intervals) {
    Segment worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;  // interval below resolution
    heap.pop();
    Segment left = kronrod(f, worst.a, mid);
    Segment right = kronrod(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++count;
  }
  // Re-sum from the leaves to shed accumulated cancellation in the running totals.
  value = 0.0;
  error = 0.0;
  std::vector<Segment> leaves;
  leaves.reserve(heap.size());
  while (!heap.empty()) {
    leaves.push_back(heap.top());
    heap.pop();
  }
  std::sort(leaves.begin(), leaves.end(), [](const Segment& l, const Segment& r) {
    return std::abs(l.value) < std::abs(r.value);
  });
  for (const auto& s : leaves) {
    value += s.value;
    error += s.error;
  }
  out.value = value;
  out.error = error;
  out.intervals = count;
  out.converged = error <= std::max(abs_tol, rel_tol * std::abs(value));
  return out;
}

double integrate_unit_interval(const std::function<double(double, double)>& f, double lo,
                               double hi, double power_at_zero, double power_at_one,
                               double rel_tol) {
  if (!(lo >= 0.0 && hi <= 1.0 && lo <= hi))
    throw std::invalid_argument("integration range must lie within [0,1]");
  if (lo == hi) return 0.0;
  const double mid = std::clamp(0.5, lo, hi);
  double total = 0.0;

  if (mid > lo) {
    if (lo == 0.0 && power_at_zero < 0.0) {
      if (power_at_zero <= -1.0) throw std::domain_error("integrand not integrable at 0");
      // y = u^p with p = 1/(c+1) turns y^c dy into a bounded density in u.
      const double p = 1.0 / (power_at_zero + 1.0);
      const double upper = std::pow(mid, 1.0 / p);
      auto g = [&](double u) {
        const double y = std::pow(u, p);
        return f(y, 1.0 - y) * p * std::pow(u, p - 1.0);
      };
      total += integrate_adaptive(g, 0.0, upper, rel_tol).value;
    } else {
      total += integrate_adaptive([&](double y) { return f(y, 1.0 - y); }, lo, mid, rel_tol).value;
    }
  }
  if (hi > mid) {
    if (hi == 1.0 && power_at_one < 0.0) {
      if (power_at_one <= -1.0) throw std::domain_error("integrand not integrable at 1");
      const double q = 1.0 / (power_at_one + 1.0);
      const double upper = std::pow(1.0 - mid, 1.0 / q);
      auto g = [&](double v) {
        const double ym = std::pow(v, q);
        return f(1.0 - ym, ym) * q * std::pow(v, q - 1.0);
      };
      total += integrate_adaptive(g, 0.0, upper, rel_tol).value;
    } else {
      // Integrate in t = 1 - y so 1 - y is exact near the upper end.
      auto g = [&](double t) { return f(1.0 - t, t); };
      total += integrate_adaptive(g, 1.0 - hi, 1.0 - mid, rel_tol).value;
    }
  }
  return total;
}

}  // namespace lwf
