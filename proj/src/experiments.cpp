#include "lwf/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "lwf/discrete_model.hpp"
#include "lwf/sde.hpp"
#include "lwf/stats.hpp"

namespace lwf {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

bool ExperimentReport::passed() const noexcept {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

Check& ExperimentReport::check_le(std::string name, double value, double tolerance, std::string source,
                                  std::string detail) {
  checks.push_back({std::move(name), value <= tolerance, value, tolerance, "<=", std::move(source), std::move(detail)});
  return checks.back();
}

Check& ExperimentReport::check_ge(std::string name, double value, double tolerance, std::string source,
                                  std::string detail) {
  checks.push_back({std::move(name), value >= tolerance, value, tolerance, ">=", std::move(source), std::move(detail)});
  return checks.back();
}

ojson ExperimentReport::to_json() const {
  ojson j;
  j["experiment"] = experiment;
  j["seed"] = seed;
  j["replicates"] = replicates;
  j["passed"] = passed();
  ojson cs = ojson::array();
  for (const auto& c : checks) {
    ojson e;
    e["name"] = c.name;
    e["passed"] = c.passed;
    e["value"] = c.value;
    e["comparison"] = c.comparison;
    e["tolerance"] = c.tolerance;
    e["tolerance_source"] = c.tolerance_source;
    if (!c.detail.empty()) e["detail"] = c.detail;
    cs.push_back(std::move(e));
  }
  j["checks"] = std::move(cs);
  j["metrics"] = metrics;
  j["config"] = config;
  return j;
}

std::string ExperimentReport::dump() const { return to_json().dump(2) + "\n"; }

namespace {

constexpr const char* kHarness = "harness";
constexpr const char* kTheorem = "theorem";
constexpr const char* kExact = "exact";

std::size_t replicate_count(const Config& cfg, const RunOptions& opts) {
  return opts.replicates.value_or(cfg.model.replicates);
}

ExperimentReport start_report(std::string name, const Config& cfg, const RunOptions& opts, std::size_t R) {
  ExperimentReport r;
  r.experiment = std::move(name);
  r.seed = opts.seed;
  r.replicates = R;
  r.config = cfg.source;
  return r;
}

template <class T>
T exp_get(const Config& cfg, const char* key, T fallback) {
  if (!cfg.experiment.contains(key)) return fallback;
  try {
    return cfg.experiment.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("experiment.") + key + " has the wrong type");
  }
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

ojson vec(const std::vector<double>& v) {
  ojson a = ojson::array();
  for (double x : v) a.push_back(x);
  return a;
}

SdeIntegrator make_sde(const Config& cfg, std::optional<double> dt = std::nullopt,
                       std::optional<double> horizon = std::nullopt) {
  auto sc = cfg.sde_config();
  if (dt) sc.dt = *dt;
  if (horizon) sc.horizon = *horizon;
  return SdeIntegrator(std::move(sc));
}

void describe_sde(ojson& m, const SdeIntegrator& sde) {
  m["sde"] = {{"dt", sde.config().dt},
              {"horizon", sde.config().horizon},
              {"eps_jump", sde.config().eps_jump},
              {"tol_ext", sde.config().tol_ext},
              {"jump_rate", sde.jump_rate()},
              {"dropped_jump_mass", sde.dropped_jump_mass()},
              {"coarse_jump_bins", sde.coarse_jump_bins()},
              {"drift", std::string(sde.config().drift.kind_name())}};
}

StationaryOptions stationary_options(const Config& cfg) {
  StationaryOptions o;
  if (!cfg.experiment.contains("stationary")) return o;
  const auto& s = cfg.experiment.at("stationary");
  require_keys(s, {"chains", "batches_per_chain", "time_per_chain", "burn_in_fraction", "transience_cap"},
               "experiment.stationary");
  o.chains = s.value("chains", o.chains);
  o.batches_per_chain = s.value("batches_per_chain", o.batches_per_chain);
  o.time_per_chain = s.value("time_per_chain", o.time_per_chain);
  o.burn_in_fraction = s.value("burn_in_fraction", o.burn_in_fraction);
  o.transience_cap = s.value("transience_cap", o.transience_cap);
  return o;
}

AncestralModel dual_model(const Config& cfg) {
  try {
    return ancestral_model_for(cfg.resolved_drift(), cfg.schedule.sigma, cfg.lambda);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace

// Rescaled discrete process vs SDE marginals at time T over an N grid.
ExperimentReport run_convergence(const Config& cfg, const RunOptions& opts) {
  require_keys(cfg.experiment, {"N_grid", "T", "sde_dt", "final_ks_max", "noise_factor"}, "experiment");
  const std::size_t R = replicate_count(cfg, opts);
  auto report = start_report("convergence", cfg, opts, R);
  const auto grid = exp_get<std::vector<long>>(cfg, "N_grid", {200, 800, 3200});
  if (grid.size() < 3) throw ConfigError("convergence needs an N grid of at least 3 values");
  const double T = exp_get(cfg, "T", cfg.model.horizon);
  const double sde_dt = exp_get(cfg, "sde_dt", cfg.model.dt);
  const double final_max = exp_get(cfg, "final_ks_max", 0.06);
  const double noise = stats::kKsCritical95 / std::sqrt(static_cast<double>(R));
  const double band = exp_get(cfg, "noise_factor", 2.0) * noise;
  const SimplexPoint x0 = cfg.model.initial_state();
  const std::size_t K = cfg.model.K;
  const SdeIntegrator sde = make_sde(cfg, sde_dt, T);
  describe_sde(report.metrics, sde);

  std::vector<double> ks_seq;
  ojson rows = ojson::array();
  for (long N : grid) {
    const DiscreteModel dm(cfg.make_schedule(N), cfg.rule);
    const auto G = static_cast<long>(std::floor(dm.generations_per_unit_time() * T + 1e-9));
    const std::string tag = "N=" + std::to_string(N);
    const auto disc = run_replicates(
        R,
        [&](std::size_t i) {
          RngStream rng(derive_seed(opts.seed, "convergence/discrete/" + tag), i);
          return run_discrete(dm, x0, G, rng).vector();
        },
        opts.exec);
    const std::vector<double> at{T};
    const auto cont = run_replicates(
        R,
        [&](std::size_t i) {
          RngStream rng(derive_seed(opts.seed, "convergence/sde/" + tag), i);
          return sde_states_at(sde, x0, at, rng).back().vector();
        },
        opts.exec);
    std::vector<double> ks(K);
    for (std::size_t c = 0; c < K; ++c) {
      std::vector<double> a(R), b(R);
      for (std::size_t r = 0; r < R; ++r) {
        a[r] = disc[r][c];
        b[r] = cont[r][c];
      }
      ks[c] = stats::ks_distance(std::move(a), std::move(b));
    }
    const double ks_max = *std::max_element(ks.begin(), ks.end());
    ks_seq.push_back(ks_max);
    rows.push_back({{"N", N},
                    {"rho", dm.schedule().rho()},
                    {"gamma", dm.schedule().gamma()},
                    {"gamma_clamped", dm.schedule().gamma_clamped()},
                    {"generations", G},
                    {"ks", vec(ks)},
                    {"ks_max", ks_max}});
  }
  report.metrics["T"] = T;
  report.metrics["ks_noise"] = noise;
  report.metrics["grid"] = std::move(rows);
  for (std::size_t j = 1; j < ks_seq.size(); ++j)
    report.check_le("ks nonincreasing N=" + std::to_string(grid[j - 1]) + "->" + std::to_string(grid[j]),
                    ks_seq[j] - ks_seq[j - 1], band, kHarness, "KS increase allowed up to the sampling-noise band");
  report.check_le("final ks", ks_seq.back(), final_max, kHarness, "about twice the KS noise at this R");
  return report;
}

// SDE fixation frequencies vs the ancestral prediction.
ExperimentReport run_fixation(const Config& cfg, const RunOptions& opts) {
  require_keys(cfg.experiment, {"stationary", "band_se"}, "experiment");
  const std::size_t R = replicate_count(cfg, opts);
  auto report = start_report("fixation", cfg, opts, R);
  const double band_se = exp_get(cfg, "band_se", 4.0);
  const SimplexPoint x0 = cfg.model.initial_state();
  const std::size_t K = x0.size();
  const AncestralModel anc = dual_model(cfg);
  const SdeIntegrator sde = make_sde(cfg);
  describe_sde(report.metrics, sde);

  struct Outcome {
    long allele;
    double time;
    long clamps;
  };
  const auto runs = run_replicates(
      R,
      [&](std::size_t i) {
        RngStream rng(derive_seed(opts.seed, "fixation/sde"), i);
        const auto run = simulate_sde(sde, x0, {0, true}, rng);
        return Outcome{run.fixed_allele ? static_cast<long>(*run.fixed_allele) : -1,
                       run.fixation_time.value_or(std::numeric_limits<double>::quiet_NaN()), run.clamp_events};
      },
      opts.exec);

  std::vector<std::size_t> counts(K, 0);
  std::size_t unfixed = 0;
  long clamps = 0;
  std::vector<double> times;
  for (const auto& o : runs) {
    clamps += o.clamps;
    if (o.allele < 0) {
      ++unfixed;
      continue;
    }
    ++counts[static_cast<std::size_t>(o.allele)];
    times.push_back(o.time);
  }
  std::vector<double> freq(K);
  for (std::size_t i = 0; i < K; ++i) freq[i] = static_cast<double>(counts[i]) / static_cast<double>(R);

  const auto pred = fixation_probabilities(anc, x0, stationary_options(cfg), derive_seed(opts.seed, "fixation/ancestral"),
                                           opts.exec);
  const auto ft = stats::mean_se(times);
  report.metrics["kappa"] = anc.kappa();
  report.metrics["kappa_star"] = anc.kappa_star();
  report.metrics["regime"] = pred.recurrent ? "recurrent" : "transient";
  report.metrics["empirical"] = vec(freq);
  report.metrics["predicted"] = vec(pred.probs);
  report.metrics["predicted_std_error"] = vec(pred.std_errors);
  report.metrics["unfixed"] = unfixed;
  report.metrics["mean_fixation_time"] = ft.mean;
  report.metrics["clamp_events"] = clamps;

  report.check_le("every replicate fixes", static_cast<double>(unfixed), 0.0, kTheorem,
                  "horizon " + num(sde.config().horizon));
  if (!pred.recurrent) {
    std::size_t top = 0;
    for (std::size_t i = 0; i < K; ++i)
      if (x0[i] > 0.0) top = i;
    report.check_ge("maximal present label " + std::to_string(top + 1) + " fixes", static_cast<double>(counts[top]),
                    static_cast<double>(R), kTheorem, "kappa >= kappa*: count of replicates");
    return report;
  }
  for (std::size_t i = 0; i < K; ++i) {
    const double p = pred.probs[i];
    const double diff = std::abs(freq[i] - p);
    if (pred.std_errors[i] == 0.0) {
      const double half = stats::kZ99TwoSided * std::sqrt(p * (1.0 - p) / static_cast<double>(R));
      report.check_le("allele " + std::to_string(i + 1) + " within 99% binomial CI", diff, half, kHarness,
                      "predicted " + num(p) + ", observed " + num(freq[i]));
    } else {
      const double se = std::sqrt(freq[i] * (1.0 - freq[i]) / static_cast<double>(R) +
                                  pred.std_errors[i] * pred.std_errors[i]);
      report.check_le("allele " + std::to_string(i + 1) + " within combined " + num(band_se) + " SE", diff,
                      band_se * se, kHarness, "predicted " + num(p) + ", observed " + num(freq[i]));
    }
  }
  return report;
}

// E[X_1(t)^n] from the SDE vs E[x^{D_t}] from the block-counting process.
ExperimentReport run_duality(const Config& cfg, const RunOptions& opts) {
  require_keys(cfg.experiment, {"n0", "t", "x", "relative_tolerance", "band_se"}, "experiment");
  if (cfg.model.K != 2) throw ConfigError("duality compares two-type processes; set model.K = 2");
  const std::size_t R = replicate_count(cfg, opts);
  auto report = start_report("duality", cfg, opts, R);
  const auto n0s = exp_get<std::vector<long>>(cfg, "n0", {cfg.model.n0});
  auto ts = exp_get<std::vector<double>>(cfg, "t", {cfg.model.horizon});
  const auto xs = exp_get<std::vector<double>>(cfg, "x", {0.3, 0.7});
  const double rel_tol = exp_get(cfg, "relative_tolerance", 0.05);
  const double band_se = exp_get(cfg, "band_se", 4.0);
  std::sort(ts.begin(), ts.end());
  for (double x : xs)
    if (!(x >= 0.0 && x <= 1.0)) throw ConfigError("duality x values must lie in [0, 1]");
  for (long n : n0s)
    if (n < 1) throw ConfigError("duality n0 values must be >= 1");

  const AncestralModel anc = dual_model(cfg);
  const DriftFunction drift = cfg.resolved_drift();
  const SdeIntegrator sde = make_sde(cfg, std::nullopt, ts.back());
  describe_sde(report.metrics, sde);

  // SDE side: X_1 at every t, for each starting x.
  std::vector<std::vector<std::vector<double>>> sde_x(xs.size());  // [x][replicate][t]
  for (std::size_t a = 0; a < xs.size(); ++a) {
    const SimplexPoint start({xs[a], 1.0 - xs[a]});
    sde_x[a] = run_replicates(
        R,
        [&](std::size_t i) {
          RngStream rng(derive_seed(opts.seed, "duality/sde/x=" + num(xs[a])), i);
          const auto states = sde_states_at(sde, start, ts, rng);
          std::vector<double> v(states.size());
          for (std::size_t k = 0; k < states.size(); ++k) v[k] = states[k][0];
          return v;
        },
        opts.exec);
  }

  const bool neutral = drift.is_neutral();
  ojson cells = ojson::array();
  for (long n0 : n0s) {
    for (std::size_t b = 0; b < ts.size(); ++b) {
      const double t = ts[b];
      const auto blocks = run_replicates(
          R,
          [&](std::size_t i) {
            RngStream rng(derive_seed(opts.seed, "duality/ancestral/n0=" + std::to_string(n0) + ",t=" + num(t)), i);
            return ancestral_state_at(anc, n0, t, rng);
          },
          opts.exec);
      for (std::size_t a = 0; a < xs.size(); ++a) {
        const double x = xs[a];
        std::vector<double> fwd(R), bwd(R);
        for (std::size_t r = 0; r < R; ++r) {
          fwd[r] = std::pow(sde_x[a][r][b], static_cast<double>(n0));
          bwd[r] = std::pow(x, static_cast<double>(blocks[r]));
        }
        const auto f = stats::mean_se(fwd);
        const auto g = stats::mean_se(bwd);
        const std::string cell = "n0=" + std::to_string(n0) + " t=" + num(t) + " x=" + num(x);
        ojson row{{"n0", n0}, {"t", t}, {"x", x}, {"sde", f.mean}, {"sde_se", f.std_error},
                  {"ancestral", g.mean}, {"ancestral_se", g.std_error}};
        if (neutral && n0 == 1) {
          // D_t stays at 1, so the dual side is x exactly; X_1 is a martingale.
          row["closed_form"] = x;
          const auto moved = std::count_if(blocks.begin(), blocks.end(), [](long d) { return d != 1; });
          report.check_le(cell + " ancestral block count stays at 1", static_cast<double>(moved), 0.0, kExact,
                          "so E[x^D_t] = x");
          report.check_le(cell + " sde mean within " + num(band_se) + " SE of x", std::abs(f.mean - x),
                          band_se * f.std_error + 1e-12, kHarness);
        } else if (neutral && n0 == 2 && cfg.lambda.is_zero()) {
          const double m2 = x - (x - x * x) * std::exp(-cfg.schedule.sigma * t);
          row["closed_form"] = m2;
          report.check_le(cell + " sde second moment vs moment ODE (relative)", std::abs(f.mean - m2) / m2, rel_tol,
                          kHarness);
          report.check_le(cell + " ancestral vs moment ODE (relative)", std::abs(g.mean - m2) / m2, rel_tol,
                          kHarness);
        } else {
          const double se = std::sqrt(f.std_error * f.std_error + g.std_error * g.std_error);
          report.check_le(cell + " sde vs ancestral within combined " + num(band_se) + " SE",
                          std::abs(f.mean - g.mean), band_se * se + 1e-12, kHarness);
        }
        cells.push_back(std::move(row));
      }
    }
  }
  report.metrics["kappa_star"] = anc.kappa_star();
  report.metrics["cells"] = std::move(cells);
  return report;
}

// E[ln(X_1 X_2 X_3)] along RPS trajectories started near the interior fixed point.
ExperimentReport run_rps_lyapunov(const Config& cfg, const RunOptions& opts) {
  require_keys(cfg.experiment, {"delta", "grid_points", "flat_tolerance"}, "experiment");
  if (cfg.model.K != 3) throw ConfigError("rps-lyapunov needs model.K = 3");
  const std::size_t R = replicate_count(cfg, opts);
  auto report = start_report("rps-lyapunov", cfg, opts, R);
  const double delta = exp_get(cfg, "delta", 0.0);
  const long G = exp_get(cfg, "grid_points", 20L);
  const double flat_tol = exp_get(cfg, "flat_tolerance", 1e-9);
  if (G < 2) throw ConfigError("rps-lyapunov needs at least 2 grid points");
  if (!(std::abs(delta) < 1.0 / 3.0)) throw ConfigError("delta must keep the start inside the simplex");
  const SimplexPoint x0({1.0 / 3.0 + delta, 1.0 / 3.0, 1.0 / 3.0 - delta});
  const SdeIntegrator sde = make_sde(cfg);
  describe_sde(report.metrics, sde);
  const double T = sde.config().horizon;
  std::vector<double> grid(static_cast<std::size_t>(G) + 1);
  for (long j = 0; j <= G; ++j) grid[static_cast<std::size_t>(j)] = T * static_cast<double>(j) / static_cast<double>(G);

  const auto logs = run_replicates(
      R,
      [&](std::size_t i) {
        RngStream rng(derive_seed(opts.seed, "rps-lyapunov/sde"), i);
        const auto states = sde_states_at(sde, x0, grid, rng);
        std::vector<double> v(states.size());
        for (std::size_t k = 0; k < states.size(); ++k) {
          const double p = states[k][0] * states[k][1] * states[k][2];
          v[k] = p > 0.0 ? std::log(p) : std::numeric_limits<double>::quiet_NaN();
        }
        return v;
      },
      opts.exec);

  std::vector<double> curve(grid.size()), curve_se(grid.size()), weights(grid.size());
  std::vector<std::size_t> excluded(grid.size(), 0);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    std::vector<double> vals;
    for (const auto& l : logs) {
      if (std::isfinite(l[k])) vals.push_back(l[k]);
      else ++excluded[k];
    }
    const auto ms = stats::mean_se(vals);
    curve[k] = ms.mean;
    curve_se[k] = ms.std_error;
    weights[k] = ms.std_error > 0.0 ? 1.0 / (ms.std_error * ms.std_error) : 1.0;
  }
  std::vector<double> slopes;
  std::size_t clamped_replicates = 0;
  for (const auto& l : logs) {
    if (!std::all_of(l.begin(), l.end(), [](double v) { return std::isfinite(v); })) {
      ++clamped_replicates;
      continue;
    }
    slopes.push_back(stats::ols_slope(grid, l).slope);
  }
  const auto slope = stats::mean_se(slopes);
  const auto fit = stats::antitonic_fit(curve, weights);
  const double iso_slope = (fit.back() - fit.front()) / T;
  const bool expect_decrease = cfg.schedule.sigma > 0.0 || !cfg.lambda.is_zero();

  ojson ex = ojson::array();
  for (auto e : excluded) ex.push_back(e);
  report.metrics["x0"] = vec(x0.vector());
  report.metrics["times"] = vec(grid);
  report.metrics["mean_log_product"] = vec(curve);
  report.metrics["mean_log_product_se"] = vec(curve_se);
  report.metrics["antitonic_fit"] = vec(fit);
  report.metrics["excluded_per_time"] = std::move(ex);
  report.metrics["replicates_with_zero_coordinate"] = clamped_replicates;
  report.metrics["replicate_slope_mean"] = slope.mean;
  report.metrics["replicate_slope_se"] = slope.std_error;
  report.metrics["antitonic_slope"] = iso_slope;
  report.metrics["expected"] = expect_decrease ? "decreasing" : "flat";

  if (slopes.size() < 2) {
    report.check_ge("replicates usable for the slope", static_cast<double>(slopes.size()), 2.0, kHarness);
    return report;
  }
  if (expect_decrease) {
    report.check_le("slope upper 99% bound", slope.mean + stats::kZ99OneSided * slope.std_error, 0.0, kHarness,
                    "replicate-level OLS slopes of ln(x1 x2 x3), one-sided");
    report.check_le("antitonic fit slope", iso_slope, 0.0, kHarness, "must be strictly negative");
    report.checks.back().passed = iso_slope < 0.0;
  } else {
    report.check_le("slope indistinguishable from zero", std::abs(slope.mean),
                    stats::kZ99TwoSided * slope.std_error + flat_tol, kHarness);
  }
  return report;
}

// Alleles go extinct one at a time under pure diffusion.
ExperimentReport run_successive_extinction(const Config& cfg, const RunOptions& opts) {
  require_keys(cfg.experiment, {"min_fraction"}, "experiment");
  const std::size_t R = replicate_count(cfg, opts);
  auto report = start_report("successive-extinction", cfg, opts, R);
  const double min_fraction = exp_get(cfg, "min_fraction", 0.99);
  if (!(cfg.schedule.sigma > 0.0)) throw ConfigError("successive-extinction needs sigma > 0");
  const SimplexPoint x0 = cfg.model.initial_state();
  const std::size_t K = x0.size();
  const SdeIntegrator sde = make_sde(cfg);
  describe_sde(report.metrics, sde);
  const double dt = sde.config().dt;

  struct Outcome {
    bool fixed;
    bool separated;
    double min_gap;
  };
  const auto runs = run_replicates(
      R,
      [&](std::size_t i) {
        RngStream rng(derive_seed(opts.seed, "successive-extinction/sde"), i);
        const auto run = simulate_sde(sde, x0, {0, true}, rng);
        std::vector<double> times;
        for (std::size_t k = 0; k < K; ++k)
          if (!run.fixed_allele || k != *run.fixed_allele)
            if (!std::isnan(run.extinction_times[k])) times.push_back(run.extinction_times[k]);
        std::sort(times.begin(), times.end());
        double gap = std::numeric_limits<double>::infinity();
        for (std::size_t k = 1; k < times.size(); ++k) gap = std::min(gap, times[k] - times[k - 1]);
        const bool fixed = run.fixed_allele.has_value() && times.size() == K - 1;
        // Extinctions in steps at least two apart are separated by more than dt.
        return Outcome{fixed, fixed && gap > 1.5 * dt, gap};
      },
      opts.exec);

  std::size_t fixed = 0, separated = 0;
  for (const auto& o : runs) {
    fixed += o.fixed;
    separated += o.separated;
  }
  const double frac = static_cast<double>(separated) / static_cast<double>(R);
  report.metrics["fixed"] = fixed;
  report.metrics["separated"] = separated;
  report.metrics["separated_fraction"] = frac;
  report.metrics["lambda_zero"] = cfg.lambda.is_zero();
  report.check_ge("every replicate ends fixed", static_cast<double>(fixed), static_cast<double>(R), kTheorem);
  report.check_ge("fraction with K-1 separated extinction times", frac, min_fraction, kHarness,
                  "separation > dt; simultaneous hits within one step are a discretization artefact");
  return report;
}

// Closed-form drifts vs Monte Carlo one-generation estimates.
ExperimentReport run_drift_oracle(const Config& cfg, const RunOptions& opts) {
  require_keys(cfg.experiment, {"pairings", "random_points", "points", "samples", "N_grid", "band_se", "point_floor"},
               "experiment");
  const auto samples = opts.replicates.value_or(exp_get<std::size_t>(cfg, "samples", 1'000'000));
  auto report = start_report("drift-oracle", cfg, opts, samples);
  const auto n_random = exp_get<std::size_t>(cfg, "random_points", 25);
  const double floor = exp_get(cfg, "point_floor", 0.02);
  const auto n_grid = exp_get<std::vector<long>>(cfg, "N_grid", {100, 1000, 10000});
  const double band_se = exp_get(cfg, "band_se", 4.0);

  struct Pairing {
    std::string name;
    std::size_t K;
    ColouringRule rule;
    std::map<int, double> tail;
    DriftFunction drift;
    double kappa;
    std::vector<std::vector<double>> points;
  };
  std::vector<Pairing> pairings;
  auto explicit_points = [](const json& j, std::size_t K) {
    std::vector<std::vector<double>> pts;
    if (!j.is_array()) throw ConfigError("points must be a list of frequency vectors");
    for (const auto& p : j) {
      auto v = p.get<std::vector<double>>();
      if (v.size() != K) throw ConfigError("oracle points must have K coordinates");
      SimplexPoint check(v);
      pts.push_back(std::move(v));
    }
    return pts;
  };
  if (cfg.experiment.contains("pairings")) {
    for (const auto& p : cfg.experiment.at("pairings")) {
      require_keys(p, {"name", "K", "rule", "offspring_tail", "drift", "kappa", "points"}, "pairing");
      const auto K = p.value("K", cfg.model.K);
      const double kappa = p.value("kappa", cfg.schedule.kappa);
      const std::string name = p.value("name", std::string("pairing ") + std::to_string(pairings.size() + 1));
      if (!p.contains("rule")) throw ConfigError("pairing '" + name + "' needs a rule");
      auto rule = parse_rule(p.at("rule"), K);
      auto tail = p.contains("offspring_tail") ? parse_tail(p.at("offspring_tail")) : cfg.model.offspring_tail;
      try {
        auto drift = p.contains("drift") ? parse_drift(p.at("drift"), K, kappa)
                                         : drift_for_rule(rule, OffspringLaw(1.0, make_tail(tail)), kappa);
        auto pts = p.contains("points") ? explicit_points(p.at("points"), K) : std::vector<std::vector<double>>{};
        pairings.push_back({name, K, std::move(rule), std::move(tail), std::move(drift), kappa, std::move(pts)});
      } catch (const std::invalid_argument& e) {
        throw ConfigError("pairing '" + name + "': " + e.what());
      } catch (const std::domain_error& e) {
        throw ConfigError("pairing '" + name + "': " + e.what());
      }
    }
  } else {
    auto pts = cfg.experiment.contains("points") ? explicit_points(cfg.experiment.at("points"), cfg.model.K)
                                                 : std::vector<std::vector<double>>{};
    pairings.push_back({std::string(cfg.rule.kind_name()), cfg.model.K, cfg.rule, cfg.model.offspring_tail,
                        cfg.resolved_drift(), cfg.schedule.kappa, std::move(pts)});
  }

  ojson out = ojson::array();
  for (std::size_t pi = 0; pi < pairings.size(); ++pi) {
    const auto& P = pairings[pi];
    RngStream point_rng(derive_seed(opts.seed, "drift-oracle/points/" + P.name), 0);
    std::vector<std::vector<double>> points = P.points;
    for (std::size_t j = 0; j < n_random; ++j) points.push_back(sample_simplex(P.K, point_rng, floor).vector());

    const auto tail_vec = make_tail(P.tail);
    auto model_for = [&](long N) {
      return DiscreteModel(make_schedule(N, cfg.schedule.alpha, P.kappa, 1.0, LambdaMeasure::zero(), tail_vec), P.rule);
    };
    const DiscreteModel dm = model_for(cfg.schedule.N);
    double worst_z = 0.0, worst_excess = -std::numeric_limits<double>::infinity();
    std::size_t failures = 0;
    ojson prow = ojson::array();
    for (std::size_t j = 0; j < points.size(); ++j) {
      const SimplexPoint x(points[j]);
      const auto est = empirical_drift(dm, x, samples,
                                       derive_seed(opts.seed, "drift-oracle/" + P.name + "/" + std::to_string(j)),
                                       opts.exec);
      const auto mu = P.drift(x.values());
      bool ok = true;
      for (std::size_t i = 0; i < P.K; ++i) {
        const double diff = std::abs(est.mean[i] - mu[i]);
        const double tol = band_se * est.std_error[i] + 1e-12;
        ok = ok && diff <= tol;
        worst_excess = std::max(worst_excess, diff - tol);
        if (est.std_error[i] > 0.0) worst_z = std::max(worst_z, diff / est.std_error[i]);
      }
      failures += !ok;
      prow.push_back({{"x", vec(x.vector())}, {"closed_form", vec(mu)}, {"empirical", vec(est.mean)},
                      {"std_error", vec(est.std_error)}, {"within_band", ok}});
    }
    report.check_le(P.name + ": points outside " + num(band_se) + " SE", static_cast<double>(failures), 0.0,
                    kHarness, "worst |z| = " + num(worst_z));

    // Exact enumeration of p^N at each N of the grid; the gap to the closed
    // form must not grow with N (for these rules it is rounding only).
    ojson trend = ojson::array();
    const OffspringLaw tail_law(1.0, tail_vec);
    if (tail_law.max_size() <= kExactEnumerationMaxSize) {
      std::vector<double> gaps;
      for (long N : n_grid) {
        const DiscreteModel dmN = model_for(N);
        double gap = 0.0;
        for (const auto& pt : points) {
          const SimplexPoint x(pt);
          const auto ex = exact_drift(dmN, x);
          const auto mu = P.drift(x.values());
          for (std::size_t i = 0; i < P.K; ++i) gap = std::max(gap, std::abs(ex.mean[i] - mu[i]));
        }
        gaps.push_back(gap);
        trend.push_back({{"N", N}, {"max_abs_gap", gap}});
      }
      report.check_le(P.name + ": exact enumeration vs closed form", *std::max_element(gaps.begin(), gaps.end()),
                      1e-8, kExact, "max over points and N grid");
    }
    out.push_back({{"name", P.name},
                   {"K", P.K},
                   {"rule", std::string(P.rule.kind_name())},
                   {"drift", std::string(P.drift.kind_name())},
                   {"kappa", P.kappa},
                   {"offspring_tail", tail_to_json(P.tail)},
                   {"worst_z", worst_z},
                   {"n_trend", std::move(trend)},
                   {"points", std::move(prow)}});
  }
  report.metrics["samples_per_point"] = samples;
  report.metrics["pairings"] = std::move(out);
  return report;
}

SimulationOutput run_simulate_discrete(const Config& cfg, const RunOptions& opts) {
  require_keys(cfg.experiment, {}, "experiment");
  const std::size_t R = replicate_count(cfg, opts);
  SimulationOutput out{start_report("simulate-discrete", cfg, opts, R), {}};
  ScalingSchedule sched = [&] {
    try {
      return cfg.make_schedule();
    } catch (const InfeasibleSchedule& e) {
      throw ConfigError(e.what());
    }
  }();
  const DiscreteModel dm(std::move(sched), cfg.rule);
  const SimplexPoint x0 = cfg.model.initial_state();
  out.trajectories = run_replicates(
      R,
      [&](std::size_t i) {
        RngStream rng(derive_seed(opts.seed, "simulate-discrete"), i);
        return simulate_discrete(dm, x0, cfg.model.generations, cfg.model.record_every, rng);
      },
      opts.exec);
  std::vector<double> mean(dm.K(), 0.0);
  std::vector<std::size_t> fixed(dm.K(), 0);
  for (const auto& tr : out.trajectories) {
    for (std::size_t i = 0; i < dm.K(); ++i) mean[i] += tr.back()[i] / static_cast<double>(R);
    if (auto f = tr.back().fixed_allele()) ++fixed[*f];
  }
  auto& m = out.report.metrics;
  m["N"] = dm.N();
  m["rho"] = dm.schedule().rho();
  m["gamma"] = dm.gamma();
  m["gamma_clamped"] = dm.schedule().gamma_clamped();
  m["generations_per_unit_time"] = dm.generations_per_unit_time();
  m["step_method"] = dm.method() == StepMethod::Aggregated ? "aggregated" : "per_individual";
  m["final_mean"] = vec(mean);
  ojson fx = ojson::array();
  for (auto f : fixed) fx.push_back(f);
  m["fixed_counts"] = std::move(fx);
  return out;
}

SimulationOutput run_simulate_sde(const Config& cfg, const RunOptions& opts) {
  require_keys(cfg.experiment, {"stop_at_fixation"}, "experiment");
  const std::size_t R = replicate_count(cfg, opts);
  SimulationOutput out{start_report("simulate-sde", cfg, opts, R), {}};
  const SdeIntegrator sde = make_sde(cfg);
  describe_sde(out.report.metrics, sde);
  const bool stop = exp_get(cfg, "stop_at_fixation", false);
  const SimplexPoint x0 = cfg.model.initial_state();
  const auto runs = run_replicates(
      R,
      [&](std::size_t i) {
        RngStream rng(derive_seed(opts.seed, "simulate-sde"), i);
        return simulate_sde(sde, x0, {cfg.model.record_every, stop}, rng);
      },
      opts.exec);
  const std::size_t K = x0.size();
  std::vector<double> mean(K, 0.0);
  std::vector<std::size_t> fixed(K, 0);
  long clamps = 0;
  for (const auto& r : runs) {
    for (std::size_t i = 0; i < K; ++i) mean[i] += r.final_state[i] / static_cast<double>(R);
    if (r.fixed_allele) ++fixed[*r.fixed_allele];
    clamps += r.clamp_events;
    out.trajectories.push_back(r.trajectory);
  }
  auto& m = out.report.metrics;
  m["final_mean"] = vec(mean);
  ojson fx = ojson::array();
  for (auto f : fixed) fx.push_back(f);
  m["fixed_counts"] = std::move(fx);
  m["clamp_events"] = clamps;
  return out;
}

ojson stationary_to_json(const StationaryEstimate& nu) {
  ojson states = ojson::array();
  for (long n = 1; n <= nu.n_max(); ++n)
    states.push_back({{"n", n},
                      {"mass", nu.occupation[static_cast<std::size_t>(n - 1)]},
                      {"std_error", nu.std_error[static_cast<std::size_t>(n - 1)]}});
  return {{"total_time", nu.total_time}, {"burn_in_per_chain", nu.burn_in}, {"batches", nu.batches.size()},
          {"states", std::move(states)}};
}

void write_ancestral_csv(std::ostream& os, const std::vector<AncestralPath>& paths) {
  const auto old = os.precision(17);
  os << "t,n,replicate\n";
  for (std::size_t r = 0; r < paths.size(); ++r)
    for (std::size_t k = 0; k < paths[r].times.size(); ++k)
      os << paths[r].times[k] << ',' << paths[r].states[k] << ',' << r << '\n';
  os.precision(old);
}

AncestralOutput run_ancestral(const Config& cfg, const RunOptions& opts) {
  require_keys(cfg.experiment, {"stationary"}, "experiment");
  const std::size_t R = replicate_count(cfg, opts);
  AncestralOutput out{start_report("ancestral", cfg, opts, R), {}, std::nullopt};
  const AncestralModel anc = dual_model(cfg);
  const StationaryOptions sopts = stationary_options(cfg);
  const long n0 = cfg.model.n0;
  const double horizon = cfg.model.horizon;
  out.paths = run_replicates(
      R,
      [&](std::size_t i) {
        RngStream rng(derive_seed(opts.seed, "ancestral/path"), i);
        return simulate_ancestral(anc, n0, horizon, rng);
      },
      opts.exec);

  auto& m = out.report.metrics;
  ojson rates = ojson::array();
  for (const auto& t : anc.rates(n0)) rates.push_back({{"target", t.target}, {"rate", t.rate}});
  m["n0"] = n0;
  m["rates_from_n0"] = std::move(rates);
  m["beta"] = anc.beta();
  m["kappa_star"] = anc.kappa_star();
  if (anc.beta() > 0.0) m["kappa_star_as_printed"] = kappa_star_as_printed(anc.lambda(), anc.beta());
  m["regime"] = anc.recurrent() ? "recurrent" : "transient";
  long peak = 0;
  double final_mean = 0.0;
  for (const auto& p : out.paths) {
    peak = std::max(peak, *std::max_element(p.states.begin(), p.states.end()));
    final_mean += static_cast<double>(p.states.back()) / static_cast<double>(R);
  }
  m["final_mean"] = final_mean;
  m["peak_state"] = peak;
  m["transience_detected"] = peak > sopts.transience_cap;

  if (anc.recurrent()) {
    out.stationary = stationary_and_pgf(anc, sopts, derive_seed(opts.seed, "ancestral/stationary"), opts.exec);
    m["stationary"] = stationary_to_json(*out.stationary);
    if (cfg.model.x0) {
      const auto pred = fixation_probabilities(*out.stationary, cfg.model.initial_state());
      m["fixation_probabilities"] = vec(pred.probs);
      m["fixation_std_errors"] = vec(pred.std_errors);
    }
  } else if (cfg.model.x0) {
    const auto pred = fixation_probabilities(anc, cfg.model.initial_state(), sopts, 0, opts.exec);
    m["fixation_probabilities"] = vec(pred.probs);
  }
  return out;
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"convergence", "fixation", "duality", "rps-lyapunov",
                                              "successive-extinction", "drift-oracle"};
  return names;
}

ExperimentReport run_experiment(std::string_view name, const Config& cfg, const RunOptions& opts) {
  if (name == "convergence") return run_convergence(cfg, opts);
  if (name == "fixation") return run_fixation(cfg, opts);
  if (name == "duality") return run_duality(cfg, opts);
  if (name == "rps-lyapunov") return run_rps_lyapunov(cfg, opts);
  if (name == "successive-extinction") return run_successive_extinction(cfg, opts);
  if (name == "drift-oracle") return run_drift_oracle(cfg, opts);
  throw ConfigError("unknown experiment '" + std::string(name) + "'");
}

}  // namespace lwf
