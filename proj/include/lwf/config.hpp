#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "lwf/colouring.hpp"
#include "lwf/lambda_measure.hpp"
#include "lwf/schedule.hpp"
#include "lwf/sde.hpp"
#include "lwf/selection.hpp"

namespace lwf {

/// Malformed or inconsistent configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ModelBlock {
  std::size_t K = 2;
  std::optional<std::vector<double>> x0;
  /// Sample-size law given more than one potential parent, {size: prob}.
  std::map<int, double> offspring_tail{{2, 1.0}};
  long generations = 100;
  long record_every = 1;
  double dt = 1e-3;
  double horizon = 1.0;
  double eps_jump = 1e-3;
  double tol_ext = 0.0;
  long n0 = 1;
  std::size_t replicates = 100;

  SimplexPoint initial_state() const;
  std::vector<double> tail_vector() const;
};

struct ScheduleBlock {
  long N = 10000;
  double alpha = 0.25;
  double kappa = 1.0;
  double sigma = 0.0;
  std::optional<double> b;
};

struct Config {
  ModelBlock model;
  ScheduleBlock schedule;
  ColouringRule rule = ColouringRule::neutral(2);
  /// Explicit drift; when absent it is derived from the rule and the tail.
  std::optional<DriftFunction> drift;
  LambdaMeasure lambda;
  nlohmann::json experiment = nlohmann::json::object();
  /// The parsed document, echoed into reports.
  nlohmann::json source;

  DriftFunction resolved_drift() const;
  ScalingSchedule make_schedule(std::optional<long> N = std::nullopt) const;
  SdeConfig sde_config() const;
};

Config parse_config(const nlohmann::json& doc);
Config load_config(const std::filesystem::path& path);

// Block parsers, also used for the per-pairing blocks of drift-oracle.
LambdaMeasure parse_lambda(const nlohmann::json& j);
ColouringRule parse_rule(const nlohmann::json& j, std::size_t K);
DriftFunction parse_drift(const nlohmann::json& j, std::size_t K, double default_kappa);
PolynomialMap parse_polynomial(const nlohmann::json& j, std::size_t K);
std::map<int, double> parse_tail(const nlohmann::json& j);

nlohmann::json lambda_to_json(const LambdaMeasure& L);
nlohmann::json tail_to_json(const std::map<int, double>& tail);

/// Throws ConfigError if `j` has a key outside `allowed`.
void require_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed, const std::string& where);

}  // namespace lwf
