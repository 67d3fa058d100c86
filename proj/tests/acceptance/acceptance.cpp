// Acceptance harness: one PASS/FAIL line per criterion. Criteria 1 and 3 run
// in-process; the experiment criteria drive the lwf CLI and read report.json.
//
// usage: acceptance_tests <path-to-lwf> <configs-dir> [criterion ...]

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lwf/lambda_measure.hpp"
#include "lwf/rng.hpp"
#include "lwf/sde.hpp"
#include "lwf/simplex.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

struct Env {
  fs::path cli;
  fs::path configs;
  fs::path work;
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CliRun {
  int exit_code = -1;
  json report;
  fs::path out;
};

CliRun run_cli(const Env& env, const std::string& command, const std::string& config, const fs::path& out,
               const std::string& extra = {}) {
  fs::remove_all(out);
  fs::create_directories(out);
  const std::string cmd = "'" + env.cli.string() + "' " + command + " --config '" + (env.configs / config).string() +
                          "' --out '" + out.string() + "' " + extra + " > '" + (out / "stdout.txt").string() +
                          "' 2> '" + (out / "stderr.txt").string() + "'";
  CliRun r;
  r.out = out;
  const int status = std::system(cmd.c_str());
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  if (fs::exists(out / "report.json")) r.report = json::parse(read_file(out / "report.json"));
  return r;
}

// Summarises a report: the failing checks, or the check count when all pass.
std::string summarize(const std::string& label, const CliRun& r) {
  std::ostringstream os;
  os << label << ": exit " << r.exit_code;
  if (!r.report.is_object()) return os.str() + ", no report";
  std::size_t n = 0;
  for (const auto& c : r.report["checks"]) {
    ++n;
    if (!c["passed"].get<bool>())
      os << ", failed " << c["name"].get<std::string>() << " (" << c["value"] << ' '
         << c["comparison"].get<std::string>() << ' ' << c["tolerance"] << ')';
  }
  os << ", " << n << " checks";
  return os.str();
}

bool report_passed(const CliRun& r) {
  return r.exit_code == 0 && r.report.is_object() && r.report.value("passed", false) && !r.report["checks"].empty();
}

Outcome experiments(const Env& env, const std::string& command, const std::vector<std::string>& configs) {
  Outcome o{true, {}};
  for (const auto& c : configs) {
    const auto r = run_cli(env, command, c, env.work / fs::path(c).stem());
    o.passed = o.passed && report_passed(r);
    if (!o.detail.empty()) o.detail += "; ";
    o.detail += summarize(fs::path(c).stem().string(), r);
  }
  return o;
}

Outcome zeta_identity() {
  lwf::RngStream rng(20240101, 0);
  double worst = 0.0;
  std::size_t points = 0;
  for (std::size_t K = 2; K <= 6; ++K) {
    std::vector<double> z(K * K);
    for (int t = 0; t < 10000; ++t, ++points) {
      auto x = lwf::sample_simplex(K, rng).vector();
      if (t % 10 == 0) {
        // Near-boundary points: one coordinate at 1e-8.
        const std::size_t i = static_cast<std::size_t>(t / 10) % K;
        x[(i + 1) % K] += x[i] - 1e-8;
        x[i] = 1e-8;
      }
      lwf::zeta(x, z);
      for (std::size_t i = 0; i < K; ++i)
        for (std::size_t j = 0; j < K; ++j) {
          double s = 0.0;
          for (std::size_t l = 0; l < K; ++l) s += z[i * K + l] * z[j * K + l];
          worst = std::max(worst, std::abs(s - x[i] * ((i == j ? 1.0 : 0.0) - x[j])));
        }
    }
  }
  std::ostringstream os;
  os << "max entrywise error " << worst << " over " << points << " points (K = 2..6), tolerance 1e-8";
  return {worst <= 1e-8, os.str()};
}

Outcome lambda_closed_forms() {
  using lwf::LambdaMeasure;
  const std::vector<LambdaMeasure> variants{
      LambdaMeasure::zero(),
      LambdaMeasure::point_mass(0.5, 1.0),
      LambdaMeasure::point_mass(1.0, 1.0),
      LambdaMeasure::point_mass(0.05, 2.0),
      LambdaMeasure::uniform(1.0),
      LambdaMeasure::uniform(0.3),
      LambdaMeasure::beta(0.5, 0.5, 1.0),
      LambdaMeasure::beta(2.0, 3.0, 1.0),
      LambdaMeasure::beta(1.5, 0.7, 2.0),
      LambdaMeasure::beta(2.5, 1.5, 1.0),
      LambdaMeasure::beta(1.0, 1.0, 1.0),
      LambdaMeasure::atoms({{0.2, 0.3}, {0.9, 0.7}}),
      LambdaMeasure::atoms({{0.1, 1.0}, {0.5, 0.5}, {1.0, 0.25}}),
  };
  double worst = 0.0;
  std::string where;
  std::size_t evaluated = 0;
  for (const auto& L : variants)
    for (long n = 2; n <= 20; ++n)
      for (long k = 2; k <= n; ++k) {
        const double a = lwf::lambda_nk(L, n, k), b = lwf::lambda_nk_quadrature(L, n, k);
        ++evaluated;
        const double scale = std::max(std::abs(a), std::abs(b));
        const double rel = scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
        if (!(rel <= worst)) {
          worst = rel;
          where = L.describe() + " n=" + std::to_string(n) + " k=" + std::to_string(k);
        }
      }
  std::ostringstream os;
  os << "max relative error " << worst << " at " << where << " over " << evaluated
     << " (variant, n, k) triples, tolerance 1e-9";
  return {worst <= 1e-9, os.str()};
}

// Reruns every subcommand with a fixed seed at 1 and 4 threads (and again at
// 1 thread) and compares every output file except timing.json byte-for-byte.
Outcome determinism(const Env& env) {
  const std::vector<std::pair<std::string, std::string>> runs{
      {"simulate-discrete", "simulate_discrete.json"},
      {"simulate-sde", "simulate_sde.json"},
      {"ancestral", "ancestral.json"},
      {"convergence", "convergence.json"},
      {"fixation", "fixation_transitive_weak.json"},
      {"duality", "duality_transitive.json"},
      {"rps-lyapunov", "rps_lyapunov_jumps.json"},
      {"successive-extinction", "successive_extinction_rps.json"},
      {"drift-oracle", "drift_oracle.json"},
  };
  Outcome o{true, {}};
  std::size_t compared = 0;
  for (const auto& [command, config] : runs) {
    std::vector<CliRun> out;
    int i = 0;
    for (const char* threads : {"1", "4", "1"}) {
      const std::string extra = std::string("--seed 12345 --replicates 24 --threads ") + threads;
      out.push_back(run_cli(env, command, config, env.work / "determinism" / (command + "_" + std::to_string(i++)), extra));
    }
    for (const auto& r : out) {
      if (r.exit_code != 0 && r.exit_code != 1) {
        o.passed = false;
        o.detail += command + " exited with " + std::to_string(r.exit_code) + "; ";
      }
    }
    for (const auto& entry : fs::directory_iterator(out[0].out)) {
      const auto name = entry.path().filename();
      if (name == "timing.json" || name == "stderr.txt") continue;
      const auto ref = read_file(entry.path());
      for (std::size_t k = 1; k < out.size(); ++k) {
        ++compared;
        if (read_file(out[k].out / name) != ref) {
          o.passed = false;
          o.detail += command + "/" + name.string() + " differs in run " + std::to_string(k) + "; ";
        }
      }
    }
    if (!fs::exists(out[0].out / "report.json")) {
      o.passed = false;
      o.detail += command + " wrote no report.json; ";
    }
  }
  o.detail += std::to_string(compared) + " file comparisons across 9 subcommands (threads 1, 4, 1)";
  return o;
}

struct Criterion {
  int id;
  std::string title;
  double budget_seconds;
  std::function<Outcome(const Env&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: acceptance_tests <lwf> <configs-dir> [criterion ...]\n";
    return 2;
  }
  Env env{fs::absolute(argv[1]), fs::absolute(argv[2]), fs::current_path() / "acceptance_work"};
  std::set<int> only;
  for (int i = 3; i < argc; ++i) only.insert(std::atoi(argv[i]));

  const std::vector<Criterion> criteria{
      {1, "zeta factor identity", 5, [](const Env&) { return zeta_identity(); }},
      {2, "drift oracle suite", 300,
       [](const Env& e) { return experiments(e, "drift-oracle", {"drift_oracle.json"}); }},
      {3, "lambda_nk closed forms vs quadrature", 10, [](const Env&) { return lambda_closed_forms(); }},
      {4, "neutral fixation", 600,
       [](const Env& e) { return experiments(e, "fixation", {"fixation_neutral.json"}); }},
      {5, "transitive dichotomy", 900,
       [](const Env& e) {
         return experiments(e, "fixation", {"fixation_transitive_strong.json", "fixation_transitive_weak.json"});
       }},
      {6, "moment duality", 600,
       [](const Env& e) { return experiments(e, "duality", {"duality_neutral.json", "duality_transitive.json"}); }},
      {7, "RPS Lyapunov dichotomy", 600,
       [](const Env& e) {
         return experiments(e, "rps-lyapunov",
                            {"rps_lyapunov_diffusion.json", "rps_lyapunov_jumps.json", "rps_lyapunov_flat.json"});
       }},
      {8, "successive extinctions", 600,
       [](const Env& e) {
         return experiments(e, "successive-extinction",
                            {"successive_extinction_neutral.json", "successive_extinction_rps.json"});
       }},
      {9, "discrete-to-SDE convergence", 900,
       [](const Env& e) { return experiments(e, "convergence", {"convergence.json"}); }},
      {10, "determinism across reruns and thread counts", 600, [](const Env& e) { return determinism(e); }},
  };

  fs::create_directories(env.work);
  int failures = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run(env);
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_budget = secs <= c.budget_seconds;
    const bool ok = o.passed && in_budget;
    failures += ok ? 0 : 1;
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.title << " (" << secs << " s of "
              << c.budget_seconds << " s budget" << (in_budget ? "" : ", over budget") << ") " << o.detail << '\n'
              << std::flush;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << '\n';
  return failures == 0 ? 0 : 1;
}
