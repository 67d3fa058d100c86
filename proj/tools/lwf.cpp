// lwf: command-line front end for the simulators and the verification experiments.
#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "lwf/experiments.hpp"

namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << text;
}

template <class F>
void write_stream(const fs::path& path, F&& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  f(os);
}

struct Args {
  std::string config;
  std::uint64_t seed = 1;
  std::optional<std::size_t> replicates;
  std::string out = ".";
  int threads = 1;
};

int run(const std::string& command, const Args& a) {
  const auto t0 = std::chrono::steady_clock::now();
  const lwf::Config cfg = lwf::load_config(a.config);
  lwf::RunOptions opts;
  opts.seed = a.seed;
  opts.replicates = a.replicates;
  opts.exec.threads = a.threads;
  if (opts.replicates && *opts.replicates < 1) throw lwf::ConfigError("--replicates must be >= 1");

  const fs::path out(a.out);
  fs::create_directories(out);

  lwf::ExperimentReport report;
  if (command == "simulate-discrete" || command == "simulate-sde") {
    auto res = command == "simulate-discrete" ? lwf::run_simulate_discrete(cfg, opts) : lwf::run_simulate_sde(cfg, opts);
    write_stream(out / "trajectories.csv", [&](std::ostream& os) { lwf::write_csv(os, res.trajectories); });
    report = std::move(res.report);
  } else if (command == "ancestral") {
    auto res = lwf::run_ancestral(cfg, opts);
    write_stream(out / "ancestral.csv", [&](std::ostream& os) { lwf::write_ancestral_csv(os, res.paths); });
    if (res.stationary) write_file(out / "stationary.json", lwf::stationary_to_json(*res.stationary).dump(2) + "\n");
    report = std::move(res.report);
  } else {
    report = lwf::run_experiment(command, cfg, opts);
  }
  write_file(out / "report.json", report.dump());

  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  nlohmann::ordered_json timing{{"experiment", report.experiment}, {"threads", a.threads}, {"wall_seconds", secs}};
  write_file(out / "timing.json", timing.dump(2) + "\n");

  for (const auto& c : report.checks)
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.value << ' ' << c.comparison << ' '
              << c.tolerance << " [" << c.tolerance_source << "]\n";
  std::cerr << report.experiment << " finished in " << secs << " s\n";
  return report.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lambda-Wright-Fisher simulators and verification experiments"};
  app.require_subcommand(1);
  Args args;
  const std::vector<std::string> commands{"simulate-discrete", "simulate-sde", "ancestral",
                                          "convergence",       "fixation",     "duality",
                                          "rps-lyapunov",      "successive-extinction", "drift-oracle"};
  for (const auto& name : commands) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", args.config, "JSON config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", args.seed, "master seed");
    sub->add_option("--replicates", args.replicates, "override model.replicates");
    sub->add_option("--out", args.out, "output directory");
    sub->add_option("--threads", args.threads, "worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return run(command, args);
  } catch (const lwf::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const lwf::InfeasibleSchedule& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
