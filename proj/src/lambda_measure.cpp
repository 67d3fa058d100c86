#include "lwf/lambda_measure.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "lwf/quadrature.hpp"

namespace lwf {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double log_gamma(double x) {
  int sign = 0;
  return ::lgamma_r(x, &sign);
}

double log_beta(double a, double b) { return log_gamma(a) + log_gamma(b) - log_gamma(a + b); }

double log_choose(long n, long k) {
  return log_gamma(static_cast<double>(n) + 1.0) - log_gamma(static_cast<double>(k) + 1.0) -
         log_gamma(static_cast<double>(n - k) + 1.0);
}

// (k-2) log z + (n-k) log(1-z) with 0 * log 0 = 0.
double log_collision_kernel(double z, long n, long k) {
  double out = 0.0;
  if (k > 2) out += static_cast<double>(k - 2) * std::log(z);
  if (n > k) out += static_cast<double>(n - k) * std::log1p(-z);
  return out;
}

void check_range(long n, long k) {
  if (n < 2 || k < 2 || k > n)
    throw std::invalid_argument("lambda_nk requires 2 <= k <= n (got n=" + std::to_string(n) +
                                ", k=" + std::to_string(k) + ")");
}

double neg_log1m(double y, double ym) { return y < 0.5 ? -std::log1p(-y) : -std::log(ym); }

}  // namespace

LambdaMeasure LambdaMeasure::point_mass(double z0, double mass) {
  if (!(z0 > 0.0 && z0 <= 1.0)) throw std::invalid_argument("point mass location must be in (0,1]");
  if (!(mass > 0.0)) throw std::invalid_argument("point mass weight must be positive");
  return LambdaMeasure(measure::PointMass{z0, mass});
}

LambdaMeasure LambdaMeasure::beta(double a, double b, double mass) {
  if (!(a > 0.0 && b > 0.0)) throw std::invalid_argument("beta parameters must be positive");
  if (!(mass > 0.0)) throw std::invalid_argument("beta measure mass must be positive");
  return LambdaMeasure(measure::BetaLaw{a, b, mass});
}

LambdaMeasure LambdaMeasure::uniform(double mass) {
  if (!(mass > 0.0)) throw std::invalid_argument("uniform measure mass must be positive");
  return LambdaMeasure(measure::UniformLaw{mass});
}

LambdaMeasure LambdaMeasure::atoms(std::vector<measure::Atom> atoms) {
  if (atoms.empty()) return zero();
  for (const auto& a : atoms) {
    if (!(a.z > 0.0 && a.z <= 1.0)) throw std::invalid_argument("atom location must be in (0,1]");
    if (!(a.weight > 0.0)) throw std::invalid_argument("atom weight must be positive");
  }
  return LambdaMeasure(measure::FiniteAtoms{std::move(atoms)});
}

bool LambdaMeasure::is_zero() const noexcept { return std::holds_alternative<measure::Zero>(v_); }

bool LambdaMeasure::has_density() const noexcept {
  return std::holds_alternative<measure::BetaLaw>(v_) ||
         std::holds_alternative<measure::UniformLaw>(v_);
}

std::vector<measure::Atom> LambdaMeasure::atom_list() const {
  return std::visit(overloaded{[](const measure::PointMass& p) {
                                 return std::vector<measure::Atom>{{p.z0, p.mass}};
                               },
                               [](const measure::FiniteAtoms& f) { return f.atoms; },
                               [](const auto&) { return std::vector<measure::Atom>{}; }},
                    v_);
}

std::pair<double, double> LambdaMeasure::beta_shape() const {
  if (const auto* b = std::get_if<measure::BetaLaw>(&v_)) return {b->a, b->b};
  if (std::holds_alternative<measure::UniformLaw>(v_)) return {1.0, 1.0};
  throw std::logic_error("measure has no density");
}

double LambdaMeasure::density(double y, double ym) const {
  return std::visit(
      overloaded{[&](const measure::BetaLaw& b) {
                   return b.mass * std::exp((b.a - 1.0) * std::log(y) + (b.b - 1.0) * std::log(ym) -
                                            log_beta(b.a, b.b));
                 },
                 [](const measure::UniformLaw& u) { return u.mass; },
                 [](const auto&) -> double { throw std::logic_error("measure has no density"); }},
      v_);
}

double LambdaMeasure::mass_at_one() const {
  double m = 0.0;
  for (const auto& a : atom_list())
    if (a.z == 1.0) m += a.weight;
  return m;
}

std::string LambdaMeasure::describe() const {
  std::ostringstream os;
  std::visit(overloaded{[&](const measure::Zero&) { os << "zero"; },
                        [&](const measure::PointMass& p) {
                          os << "point_mass(z0=" << p.z0 << ", mass=" << p.mass << ")";
                        },
                        [&](const measure::BetaLaw& b) {
                          os << "beta(a=" << b.a << ", b=" << b.b << ", mass=" << b.mass << ")";
                        },
                        [&](const measure::UniformLaw& u) { os << "uniform(mass=" << u.mass << ")"; },
                        [&](const measure::FiniteAtoms& f) {
                          os << "atoms(" << f.atoms.size() << ")";
                        }},
             v_);
  return os.str();
}

double lambda_total_mass(const LambdaMeasure& L) {
  return std::visit(overloaded{[](const measure::Zero&) { return 0.0; },
                               [](const measure::PointMass& p) { return p.mass; },
                               [](const measure::BetaLaw& b) { return b.mass; },
                               [](const measure::UniformLaw& u) { return u.mass; },
                               [](const measure::FiniteAtoms& f) {
                                 double s = 0.0;
                                 for (const auto& a : f.atoms) s += a.weight;
                                 return s;
                               }},
                    L.variant());
}

double lambda_nk(const LambdaMeasure& L, long n, long k) {
  check_range(n, k);
  const auto atom_term = [&](double z, double w) {
    return w * std::pow(z, static_cast<double>(k - 2)) * std::pow(1.0 - z, static_cast<double>(n - k));
  };
  return std::visit(
      overloaded{[](const measure::Zero&) { return 0.0; },
                 [&](const measure::PointMass& p) { return atom_term(p.z0, p.mass); },
                 [&](const measure::FiniteAtoms& f) {
                   double s = 0.0;
                   for (const auto& a : f.atoms) s += atom_term(a.z, a.weight);
                   return s;
                 },
                 [&](const measure::BetaLaw& b) {
                   return b.mass * std::exp(log_beta(b.a + static_cast<double>(k - 2),
                                                     b.b + static_cast<double>(n - k)) -
                                            log_beta(b.a, b.b));
                 },
                 [&](const measure::UniformLaw& u) {
                   return u.mass * std::exp(log_beta(static_cast<double>(k - 1),
                                                     static_cast<double>(n - k + 1)));
                 }},
      L.variant());
}

double lambda_nk_quadrature(const LambdaMeasure& L, long n, long k) {
  check_range(n, k);
  const double pk = static_cast<double>(k - 2);
  const double pn = static_cast<double>(n - k);
  return integrate_measure(
      L, [&](double y, double ym) { return std::pow(y, pk) * std::pow(ym, pn); }, 0.0, 1.0, pk, pn);
}

double collision_rate(const LambdaMeasure& L, long n, long k) {
  check_range(n, k);
  const double lc = log_choose(n, k);
  return std::visit(
      overloaded{[](const measure::Zero&) { return 0.0; },
                 [&](const measure::PointMass& p) {
                   return p.mass * std::exp(lc + log_collision_kernel(p.z0, n, k));
                 },
                 [&](const measure::FiniteAtoms& f) {
                   double s = 0.0;
                   for (const auto& a : f.atoms) s += a.weight * std::exp(lc + log_collision_kernel(a.z, n, k));
                   return s;
                 },
                 [&](const measure::BetaLaw& b) {
                   return b.mass * std::exp(lc +
                                            log_beta(b.a + static_cast<double>(k - 2),
                                                     b.b + static_cast<double>(n - k)) -
                                            log_beta(b.a, b.b));
                 },
                 [&](const measure::UniformLaw& u) {
                   return u.mass * std::exp(lc + log_beta(static_cast<double>(k - 1),
                                                          static_cast<double>(n - k + 1)));
                 }},
      L.variant());
}

double integrate_measure(const LambdaMeasure& L, const std::function<double(double, double)>& f,
                         double lo, double hi, double power_at_zero, double power_at_one) {
  if (L.is_zero()) return 0.0;
  if (L.has_density()) {
    const auto [a, b] = L.beta_shape();
    return integrate_unit_interval(
        [&](double y, double ym) { return f(y, ym) * L.density(y, ym); }, lo, hi,
        power_at_zero + a - 1.0, power_at_one + b - 1.0);
  }
  double s = 0.0;
  for (const auto& atom : L.atom_list())
    if (atom.z >= lo && atom.z <= hi) s += atom.weight * f(atom.z, 1.0 - atom.z);
  return s;
}

double kappa_star(const LambdaMeasure& L, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("kappa_star requires beta > 0");
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (L.is_zero()) return 0.0;
  if (L.mass_at_one() > 0.0) return inf;
  if (L.has_density()) {
    if (L.beta_shape().first <= 1.0) return inf;
    // |log(1-y)|/y^2 ~ 1/y at the origin.
    const double integral = integrate_measure(
        L, [](double y, double ym) { return neg_log1m(y, ym) / (y * y); }, 0.0, 1.0, -1.0, 0.0);
    return integral / beta;
  }
  double s = 0.0;
  for (const auto& a : L.atom_list()) s += a.weight * neg_log1m(a.z, 1.0 - a.z) / (a.z * a.z);
  return s / beta;
}

double kappa_star_as_printed(const LambdaMeasure& L, double beta) { return -kappa_star(L, beta); }

TruncatedJumpLaw::TruncatedJumpLaw(const LambdaMeasure& L, double cutoff)
    : measure_(L), cutoff_(cutoff) {
  if (!(cutoff >= 0.0 && cutoff <= 1.0)) throw std::invalid_argument("jump cutoff must be in [0,1]");
  if (L.is_zero()) return;
  if (L.has_density()) {
    std::tie(a_, b_) = L.beta_shape();
    if (cutoff == 0.0 && a_ <= 2.0)
      throw std::invalid_argument("Lambda(dz)/z^2 has infinite mass near 0; use a positive cutoff");
    const double scale = L.density(0.5, 0.5) / (std::pow(0.5, a_ - 1.0) * std::pow(0.5, b_ - 1.0));
    split_ = std::max(cutoff, 0.5);
    auto kernel = [&](double y, double ym) {
      return std::pow(y, a_ - 3.0) * std::pow(ym, b_ - 1.0);
    };
    low_weight_ = split_ > cutoff
                      ? integrate_unit_interval(kernel, cutoff, split_, a_ - 3.0, b_ - 1.0)
                      : 0.0;
    high_weight_ = integrate_unit_interval(kernel, split_, 1.0, a_ - 3.0, b_ - 1.0);
    rate_ = scale * (low_weight_ + high_weight_);
    excluded_ = cutoff > 0.0 ? integrate_measure(L, [](double, double) { return 1.0; }, 0.0, cutoff)
                             : 0.0;
    return;
  }
  for (const auto& a : L.atom_list()) {
    if (a.z >= cutoff) {
      atoms_.push_back({a.z, a.weight / (a.z * a.z)});
      rate_ += a.weight / (a.z * a.z);
    } else {
      excluded_ += a.weight;
    }
  }
}

double TruncatedJumpLaw::sample(RngStream& rng) const {
  if (!(rate_ > 0.0)) throw std::logic_error("sampling from an empty jump law");
  if (measure_.has_density()) return sample_density(rng);
  if (atoms_.size() == 1) return atoms_.front().z;
  double u = rng.uniform() * rate_;
  for (const auto& a : atoms_) {
    if (u < a.weight) return a.z;
    u -= a.weight;
  }
  return atoms_.back().z;
}

double TruncatedJumpLaw::sample_density(RngStream& rng) const {
  const double e = a_ - 3.0;
  // Pick the piece by its exact weight first; redrawing the piece after a
  // rejection would tilt the mixture towards the piece accepting more often.
  if (rng.uniform() * (low_weight_ + high_weight_) < low_weight_) {
    // Proposal proportional to y^e on [cutoff, split].
    const double bound = b_ >= 1.0 ? std::pow(1.0 - cutoff_, b_ - 1.0) : std::pow(1.0 - split_, b_ - 1.0);
    for (;;) {
      const double u = rng.uniform();
      double y;
      if (std::abs(e + 1.0) < 1e-12) {
        y = cutoff_ * std::pow(split_ / cutoff_, u);
      } else {
        const double lo = std::pow(cutoff_, e + 1.0);
        const double hi = std::pow(split_, e + 1.0);
        y = std::pow(lo + u * (hi - lo), 1.0 / (e + 1.0));
      }
      if (rng.uniform() * bound <= std::pow(1.0 - y, b_ - 1.0)) return y;
    }
  }
  // Proposal proportional to (1-y)^(b-1) on [split, 1].
  const double bound = a_ >= 3.0 ? 1.0 : std::pow(split_, e);
  for (;;) {
    const double t = (1.0 - split_) * std::pow(rng.uniform_open(), 1.0 / b_);
    const double y = 1.0 - t;
    if (rng.uniform() * bound <= std::pow(y, e)) return y;
  }
}

}  // namespace lwf
