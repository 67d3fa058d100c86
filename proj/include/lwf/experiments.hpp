#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "lwf/ancestral.hpp"
#include "lwf/config.hpp"
#include "lwf/replicate.hpp"
#include "lwf/trajectory.hpp"

namespace lwf {

/// One pass/fail judgement. `tolerance_source` says where the threshold comes
/// from: "exact" (algebraic identity), "theorem" (a qualitative statement
/// that must hold in every replicate) or "harness" (a statistical band chosen
/// here, not a property of the model).
struct Check {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double tolerance = 0.0;
  std::string comparison;
  std::string tolerance_source;
  std::string detail;
};

struct ExperimentReport {
  std::string experiment;
  std::uint64_t seed = 0;
  std::size_t replicates = 0;
  nlohmann::json config;
  nlohmann::ordered_json metrics = nlohmann::ordered_json::object();
  std::vector<Check> checks;

  bool passed() const noexcept;
  /// value <= tolerance
  Check& check_le(std::string name, double value, double tolerance, std::string source, std::string detail = {});
  /// value >= tolerance
  Check& check_ge(std::string name, double value, double tolerance, std::string source, std::string detail = {});
  nlohmann::ordered_json to_json() const;
  /// Canonical serialization; identical inputs give identical bytes.
  std::string dump() const;
};

struct RunOptions {
  std::uint64_t seed = 1;
  std::optional<std::size_t> replicates;
  Execution exec;
};

ExperimentReport run_convergence(const Config& cfg, const RunOptions& opts);
ExperimentReport run_fixation(const Config& cfg, const RunOptions& opts);
ExperimentReport run_duality(const Config& cfg, const RunOptions& opts);
ExperimentReport run_rps_lyapunov(const Config& cfg, const RunOptions& opts);
ExperimentReport run_successive_extinction(const Config& cfg, const RunOptions& opts);
ExperimentReport run_drift_oracle(const Config& cfg, const RunOptions& opts);

struct SimulationOutput {
  ExperimentReport report;
  std::vector<Trajectory> trajectories;
};

struct AncestralOutput {
  ExperimentReport report;
  std::vector<AncestralPath> paths;
  std::optional<StationaryEstimate> stationary;
};

SimulationOutput run_simulate_discrete(const Config& cfg, const RunOptions& opts);
SimulationOutput run_simulate_sde(const Config& cfg, const RunOptions& opts);
AncestralOutput run_ancestral(const Config& cfg, const RunOptions& opts);

/// Names accepted by run_experiment (the six verification experiments).
const std::vector<std::string>& experiment_names();
ExperimentReport run_experiment(std::string_view name, const Config& cfg, const RunOptions& opts);

nlohmann::ordered_json stationary_to_json(const StationaryEstimate& nu);
void write_ancestral_csv(std::ostream& os, const std::vector<AncestralPath>& paths);

}  // namespace lwf
