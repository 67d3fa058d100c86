#include <doctest.h>

#include <cmath>

#include "lwf/config.hpp"
#include "lwf/experiments.hpp"
#include "lwf/stats.hpp"

using namespace lwf;
using nlohmann::json;

TEST_CASE("mean and standard error") {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  const auto ms = stats::mean_se(v);
  CHECK(ms.mean == doctest::Approx(2.5));
  CHECK(ms.std_error == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
  CHECK(ms.n == 4);
}

TEST_CASE("two-sample KS distance") {
  CHECK(stats::ks_distance({1, 2, 3}, {1, 2, 3}) == 0.0);
  CHECK(stats::ks_distance({0, 0, 0}, {1, 1, 1}) == 1.0);
  CHECK(stats::ks_distance({1, 2, 3, 4}, {3, 4, 5, 6}) == doctest::Approx(0.5));
  // Ties between samples are handled at the shared value.
  CHECK(stats::ks_distance({1, 1, 2}, {1, 2, 2}) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("Wilson interval") {
  const auto ci = stats::wilson_interval(50, 100, 1.96);
  CHECK(ci.lo == doctest::Approx(0.4038).epsilon(1e-3));
  CHECK(ci.hi == doctest::Approx(0.5962).epsilon(1e-3));
  const auto zero = stats::wilson_interval(0, 100);
  CHECK(zero.lo == 0.0);
  CHECK(zero.hi > 0.0);
  CHECK(stats::wilson_interval(100, 100).hi == doctest::Approx(1.0));
}

TEST_CASE("least-squares slope") {
  const std::vector<double> x{0, 1, 2, 3}, y{1, 3, 5, 7};
  const auto s = stats::ols_slope(x, y);
  CHECK(s.slope == doctest::Approx(2.0));
  CHECK(s.intercept == doctest::Approx(1.0));
  CHECK(s.std_error == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("monotone fits") {
  const std::vector<double> y{3, 1, 2, 0};
  const auto a = stats::antitonic_fit(y);
  CHECK(a == std::vector<double>{3, 1.5, 1.5, 0});
  const auto i = stats::isotonic_fit(std::vector<double>{1, 3, 2, 4});
  CHECK(i == std::vector<double>{1, 2.5, 2.5, 4});
  const std::vector<double> w{1, 3};
  CHECK(stats::isotonic_fit(std::vector<double>{2, 0}, w) == std::vector<double>{0.5, 0.5});
}

namespace {

json small_sde_doc() {
  return json::parse(R"({
    "model": {"K": 3, "x0": [0.4, 0.35, 0.25], "dt": 0.002, "horizon": 0.5, "record_every": 50, "replicates": 6},
    "schedule": {"sigma": 0.5, "kappa": 1.0},
    "rule": {"kind": "rps"},
    "lambda": {"kind": "point_mass", "z0": 0.3, "mass": 1.0}
  })");
}

}  // namespace

TEST_CASE("config parsing") {
  const auto cfg = parse_config(small_sde_doc());
  CHECK(cfg.model.K == 3);
  CHECK(cfg.resolved_drift().kind_name() == "rps");
  CHECK(cfg.sde_config().dt == 0.002);
  // Lambda round-trips through its JSON form.
  const auto again = parse_lambda(lambda_to_json(cfg.lambda));
  CHECK(lambda_total_mass(again) == doctest::Approx(lambda_total_mass(cfg.lambda)));
  CHECK(parse_tail(tail_to_json({{2, 0.25}, {5, 0.75}})) == std::map<int, double>{{2, 0.25}, {5, 0.75}});
}

TEST_CASE("config errors") {
  auto doc = small_sde_doc();
  doc["model"]["bogus"] = 1;
  CHECK_THROWS_AS(parse_config(doc), ConfigError);
  doc = small_sde_doc();
  doc["extra"] = json::object();
  CHECK_THROWS_AS(parse_config(doc), ConfigError);
  doc = small_sde_doc();
  doc["model"]["x0"] = json::array({0.5, 0.5});
  CHECK_THROWS_AS(parse_config(doc), ConfigError);
  doc = small_sde_doc();
  doc["rule"]["kind"] = "nonsense";
  CHECK_THROWS_AS(parse_config(doc), ConfigError);
  doc = small_sde_doc();
  doc["lambda"] = json{{"kind", "beta"}, {"a", -1.0}, {"b", 1.0}, {"mass", 1.0}};
  CHECK_THROWS_AS(parse_config(doc), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("reports are independent of the thread count") {
  const auto cfg = parse_config(small_sde_doc());
  RunOptions one{7, std::nullopt, Execution{1}}, three{7, std::nullopt, Execution{3}};
  CHECK(run_simulate_sde(cfg, one).report.dump() == run_simulate_sde(cfg, three).report.dump());
  CHECK(run_simulate_discrete(cfg, one).report.dump() == run_simulate_discrete(cfg, three).report.dump());
  RunOptions other{8, std::nullopt, Execution{1}};
  CHECK(run_simulate_sde(cfg, one).report.dump() != run_simulate_sde(cfg, other).report.dump());
}

TEST_CASE("report serialization") {
  ExperimentReport r;
  r.experiment = "demo";
  r.check_le("a", 0.5, 1.0, "harness");
  CHECK(r.passed());
  r.check_ge("b", 0.5, 1.0, "exact");
  CHECK_FALSE(r.passed());
  const auto j = r.to_json();
  CHECK(j["checks"].size() == 2);
  CHECK(j["checks"][1]["passed"] == false);
  CHECK(j["passed"] == false);
  CHECK(r.dump().back() == '\n');
}

TEST_CASE("run_experiment dispatch") {
  CHECK(experiment_names().size() == 6);
  CHECK_THROWS(run_experiment("nope", parse_config(small_sde_doc()), {}));
}
