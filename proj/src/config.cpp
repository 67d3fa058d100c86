#include "lwf/config.hpp"

#include "lwf/combinatorics.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace lwf {

using nlohmann::json;

void require_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

namespace {

template <class T>
T get(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError("missing key '" + std::string(key) + "' in " + where);
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("key '" + std::string(key) + "' in " + where + " has the wrong type");
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback, const std::string& where) {
  return j.contains(key) ? get<T>(j, key, where) : fallback;
}

std::vector<double> square_matrix(const json& j, std::size_t K, const std::string& what) {
  std::vector<double> out;
  if (!j.is_array() || j.size() != K) throw ConfigError(what + " must be a " + std::to_string(K) + "x" + std::to_string(K) + " matrix");
  for (const auto& row : j) {
    if (!row.is_array() || row.size() != K) throw ConfigError(what + " must be a square matrix");
    for (const auto& v : row) {
      if (!v.is_number()) throw ConfigError(what + " entries must be numbers");
      out.push_back(v.get<double>());
    }
  }
  return out;
}

std::vector<std::pair<int, int>> parse_edges(const json& j, std::size_t K) {
  if (!j.is_array()) throw ConfigError("beats must be a list of [winner, loser] pairs");
  std::vector<std::pair<int, int>> edges;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
      throw ConfigError("beats must be a list of [winner, loser] pairs");
    const int w = e[0].get<int>(), l = e[1].get<int>();
    if (w < 1 || l < 1 || static_cast<std::size_t>(w) > K || static_cast<std::size_t>(l) > K)
      throw ConfigError("beats labels must be in 1..K");
    edges.emplace_back(w - 1, l - 1);
  }
  return edges;
}

std::vector<char> beats_matrix(const std::vector<std::pair<int, int>>& edges, std::size_t K) {
  std::vector<char> beats(K * K, 0);
  for (auto [w, l] : edges) beats[static_cast<std::size_t>(w) * K + static_cast<std::size_t>(l)] = 1;
  return beats;
}

}  // namespace

std::map<int, double> parse_tail(const json& j) {
  if (!j.is_object() || j.empty()) throw ConfigError("offspring tail must be a nonempty {size: prob} object");
  std::map<int, double> tail;
  for (const auto& [key, v] : j.items()) {
    int k = 0;
    try {
      std::size_t used = 0;
      k = std::stoi(key, &used);
      if (used != key.size()) throw std::invalid_argument(key);
    } catch (const std::exception&) {
      throw ConfigError("offspring tail keys must be integers, got '" + key + "'");
    }
    if (!v.is_number()) throw ConfigError("offspring tail probabilities must be numbers");
    tail[k] = v.get<double>();
  }
  return tail;
}

json tail_to_json(const std::map<int, double>& tail) {
  json j = json::object();
  for (auto [k, p] : tail) j[std::to_string(k)] = p;
  return j;
}

LambdaMeasure parse_lambda(const json& j) {
  const std::string where = "lambda";
  const auto kind = get<std::string>(j, "kind", where);
  try {
    if (kind == "zero") {
      require_keys(j, {"kind"}, where);
      return LambdaMeasure::zero();
    }
    if (kind == "point_mass") {
      require_keys(j, {"kind", "z0", "mass"}, where);
      return LambdaMeasure::point_mass(get<double>(j, "z0", where), get_or(j, "mass", 1.0, where));
    }
    if (kind == "beta") {
      require_keys(j, {"kind", "a", "b", "mass"}, where);
      return LambdaMeasure::beta(get<double>(j, "a", where), get<double>(j, "b", where), get_or(j, "mass", 1.0, where));
    }
    if (kind == "uniform") {
      require_keys(j, {"kind", "mass"}, where);
      return LambdaMeasure::uniform(get_or(j, "mass", 1.0, where));
    }
    if (kind == "atoms") {
      require_keys(j, {"kind", "atoms"}, where);
      std::vector<measure::Atom> atoms;
      for (const auto& a : get<json>(j, "atoms", where)) {
        if (!a.is_array() || a.size() != 2 || !a[0].is_number() || !a[1].is_number())
          throw ConfigError("lambda atoms must be [z, weight] pairs");
        atoms.push_back({a[0].get<double>(), a[1].get<double>()});
      }
      return LambdaMeasure::atoms(std::move(atoms));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("lambda: ") + e.what());
  }
  throw ConfigError("unknown lambda kind '" + kind + "'");
}

json lambda_to_json(const LambdaMeasure& L) {
  return std::visit(
      [](const auto& m) -> json {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, measure::Zero>) return {{"kind", "zero"}};
        else if constexpr (std::is_same_v<M, measure::PointMass>) return {{"kind", "point_mass"}, {"z0", m.z0}, {"mass", m.mass}};
        else if constexpr (std::is_same_v<M, measure::BetaLaw>) return {{"kind", "beta"}, {"a", m.a}, {"b", m.b}, {"mass", m.mass}};
        else if constexpr (std::is_same_v<M, measure::UniformLaw>) return {{"kind", "uniform"}, {"mass", m.mass}};
        else {
          json atoms = json::array();
          for (const auto& a : m.atoms) atoms.push_back({a.z, a.weight});
          return {{"kind", "atoms"}, {"atoms", atoms}};
        }
      },
      L.variant());
}

PolynomialMap parse_polynomial(const json& j, std::size_t K) {
  if (!j.is_array() || j.size() != K) throw ConfigError("polynomial must list one component per type");
  std::vector<std::vector<Monomial>> comps(K);
  for (std::size_t i = 0; i < K; ++i) {
    if (!j[i].is_array()) throw ConfigError("polynomial components must be lists of monomials");
    for (const auto& m : j[i]) {
      require_keys(m, {"exponents", "coeff"}, "monomial");
      Monomial mono{get<std::vector<int>>(m, "exponents", "monomial"), get<double>(m, "coeff", "monomial")};
      if (mono.exponents.size() != K) throw ConfigError("monomial exponents must have length K");
      comps[i].push_back(std::move(mono));
    }
  }
  try {
    return PolynomialMap(K, std::move(comps));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("polynomial: ") + e.what());
  }
}

ColouringRule parse_rule(const json& j, std::size_t K) {
  const std::string where = "rule";
  const auto kind = get<std::string>(j, "kind", where);
  try {
    if (kind == "neutral" || kind == "transitive" || kind == "rps" || kind == "neg_freq_dep" || kind == "pos_freq_dep") {
      require_keys(j, {"kind"}, where);
      if (kind == "neutral") return ColouringRule::neutral(K);
      if (kind == "transitive") return ColouringRule::transitive(K);
      if (kind == "neg_freq_dep") return ColouringRule::neg_freq_dep(K);
      if (kind == "pos_freq_dep") return ColouringRule::pos_freq_dep(K);
      if (K != 3) throw ConfigError("rps rule needs K = 3");
      return ColouringRule::rps();
    }
    if (kind == "transitive_mutation") {
      require_keys(j, {"kind", "mutation_prob", "mutation_kernel"}, where);
      return ColouringRule::transitive_with_mutation(K, get<double>(j, "mutation_prob", where),
                                                     square_matrix(get<json>(j, "mutation_kernel", where), K, "mutation_kernel"));
    }
    if (kind == "logistic") {
      require_keys(j, {"kind", "P"}, where);
      return ColouringRule::logistic(K, square_matrix(get<json>(j, "P", where), K, "P"));
    }
    if (kind == "partial_order" || kind == "food_web") {
      require_keys(j, {"kind", "beats"}, where);
      return ColouringRule::partial_order(K, parse_edges(get<json>(j, "beats", where), K));
    }
    if (kind == "bernstein") {
      require_keys(j, {"kind", "polynomial", "degree", "table"}, where);
      if (j.contains("polynomial")) {
        if (j.contains("table")) throw ConfigError("bernstein rule takes either 'polynomial' or 'table'");
        return bernstein_rule(parse_polynomial(j.at("polynomial"), K));
      }
      const int degree = get<int>(j, "degree", where);
      if (degree < 1) throw ConfigError("bernstein degree must be >= 1");
      std::vector<double> table(composition_count(K, degree) * K, std::numeric_limits<double>::quiet_NaN());
      for (const auto& row : get<json>(j, "table", where)) {
        require_keys(row, {"z", "alpha"}, "bernstein table row");
        const auto z = get<std::vector<int>>(row, "z", "bernstein table row");
        const auto alpha = get<std::vector<double>>(row, "alpha", "bernstein table row");
        int total = 0;
        for (int v : z) total += v;
        if (z.size() != K || alpha.size() != K || total != degree)
          throw ConfigError("bernstein table rows need |z| = degree and K coefficients");
        const std::size_t r = composition_rank(z);
        for (std::size_t i = 0; i < K; ++i) table[r * K + i] = alpha[i];
      }
      for (double v : table)
        if (std::isnan(v)) throw ConfigError("bernstein table must cover every multi-index of the degree");
      return bernstein_rule_from_table(K, degree, std::move(table));
    }
  } catch (const BernsteinRangeError& e) {
    throw ConfigError(std::string("rule: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("rule: ") + e.what());
  }
  throw ConfigError("unknown rule kind '" + kind + "'");
}

DriftFunction parse_drift(const json& j, std::size_t K, double default_kappa) {
  const std::string where = "drift";
  const auto kind = get<std::string>(j, "kind", where);
  const double kappa = get_or(j, "kappa", default_kappa, where);
  try {
    if (kind == "neutral") {
      require_keys(j, {"kind"}, where);
      return DriftFunction::neutral(K);
    }
    if (kind == "transitive") {
      require_keys(j, {"kind", "kappa", "pi"}, where);
      const auto pi_map = j.contains("pi") ? parse_tail(j.at("pi")) : std::map<int, double>{{1, 1.0}};
      std::vector<double> pi(static_cast<std::size_t>(pi_map.rbegin()->first) + 1, 0.0);
      double total = 0.0;
      for (auto [k, p] : pi_map) {
        if (k < 1) throw ConfigError("transitive pi is indexed by increments k >= 1");
        pi[static_cast<std::size_t>(k)] = p;
        total += p;
      }
      if (std::abs(total - 1.0) > 1e-12) throw ConfigError("transitive pi must sum to 1");
      return DriftFunction(K, drifts::Transitive{kappa, std::move(pi)});
    }
    if (kind == "logistic") {
      require_keys(j, {"kind", "kappa", "P"}, where);
      auto p = square_matrix(get<json>(j, "P", where), K, "P");
      ColouringRule::logistic(K, p);  // validates
      return DriftFunction(K, drifts::Logistic{kappa, std::move(p)});
    }
    if (kind == "rps") {
      require_keys(j, {"kind", "kappa"}, where);
      return DriftFunction(K, drifts::Rps{kappa});
    }
    if (kind == "food_web") {
      require_keys(j, {"kind", "kappa", "beats"}, where);
      return DriftFunction(K, drifts::FoodWeb{kappa, beats_matrix(parse_edges(get<json>(j, "beats", where), K), K)});
    }
    if (kind == "neg_freq_dep") {
      require_keys(j, {"kind", "kappa"}, where);
      return DriftFunction(K, drifts::NegFreqDep{kappa});
    }
    if (kind == "pos_freq_dep") {
      require_keys(j, {"kind", "kappa"}, where);
      return DriftFunction(K, drifts::PosFreqDep{kappa});
    }
    if (kind == "polynomial") {
      require_keys(j, {"kind", "lambda", "g"}, where);
      auto g = parse_polynomial(get<json>(j, "g", where), K);
      bernstein_rule(g);  // g must map the simplex into itself
      return DriftFunction(K, drifts::FromPolynomial{get_or(j, "lambda", default_kappa, where), std::move(g)});
    }
  } catch (const BernsteinRangeError& e) {
    throw ConfigError(std::string("drift: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("drift: ") + e.what());
  }
  throw ConfigError("unknown drift kind '" + kind + "'");
}

SimplexPoint ModelBlock::initial_state() const {
  if (!x0) return SimplexPoint::uniform(K);
  return SimplexPoint(*x0);
}

std::vector<double> ModelBlock::tail_vector() const {
  return make_tail(offspring_tail);
}

DriftFunction Config::resolved_drift() const {
  if (drift) return *drift;
  return drift_for_rule(rule, OffspringLaw(1.0, model.tail_vector()), schedule.kappa);
}

ScalingSchedule Config::make_schedule(std::optional<long> N) const {
  return lwf::make_schedule(N.value_or(schedule.N), schedule.alpha, schedule.kappa, schedule.sigma, lambda,
                            model.tail_vector(), schedule.b);
}

SdeConfig Config::sde_config() const {
  return SdeConfig{resolved_drift(), schedule.sigma, lambda, model.eps_jump, model.dt, model.horizon, model.tol_ext};
}

Config parse_config(const json& doc) {
  require_keys(doc, {"model", "rule", "drift", "lambda", "schedule", "experiment"}, "config");
  Config c;
  c.source = doc;
  try {
    const json& m = doc.contains("model") ? doc.at("model") : throw ConfigError("missing 'model' block");
    require_keys(m, {"K", "x0", "offspring_tail", "generations", "record_every", "dt", "horizon", "eps_jump",
                     "tol_ext", "n0", "replicates"},
                 "model");
    auto& mb = c.model;
    mb.K = get<std::size_t>(m, "K", "model");
    if (mb.K < 2) throw ConfigError("model.K must be >= 2");
    if (m.contains("x0")) {
      mb.x0 = get<std::vector<double>>(m, "x0", "model");
      if (mb.x0->size() != mb.K) throw ConfigError("model.x0 must have K entries");
      SimplexPoint check(*mb.x0);
    }
    if (m.contains("offspring_tail")) mb.offspring_tail = parse_tail(m.at("offspring_tail"));
    make_tail(mb.offspring_tail);
    mb.generations = get_or(m, "generations", mb.generations, "model");
    mb.record_every = get_or(m, "record_every", mb.record_every, "model");
    mb.dt = get_or(m, "dt", mb.dt, "model");
    mb.horizon = get_or(m, "horizon", mb.horizon, "model");
    mb.eps_jump = get_or(m, "eps_jump", mb.eps_jump, "model");
    mb.tol_ext = get_or(m, "tol_ext", mb.tol_ext, "model");
    mb.n0 = get_or(m, "n0", mb.n0, "model");
    mb.replicates = get_or(m, "replicates", mb.replicates, "model");
    if (mb.generations < 0 || mb.record_every < 1 || !(mb.dt > 0.0) || !(mb.horizon >= 0.0) || mb.n0 < 1 ||
        mb.replicates < 1)
      throw ConfigError("model: generations >= 0, record_every >= 1, dt > 0, horizon >= 0, n0 >= 1, replicates >= 1");

    const json& s = doc.contains("schedule") ? doc.at("schedule") : throw ConfigError("missing 'schedule' block");
    require_keys(s, {"N", "alpha", "kappa", "sigma", "b"}, "schedule");
    auto& sb = c.schedule;
    sb.N = get_or(s, "N", sb.N, "schedule");
    sb.alpha = get_or(s, "alpha", sb.alpha, "schedule");
    sb.kappa = get_or(s, "kappa", sb.kappa, "schedule");
    sb.sigma = get<double>(s, "sigma", "schedule");
    if (s.contains("b")) sb.b = get<double>(s, "b", "schedule");
    if (!(sb.sigma >= 0.0)) throw ConfigError("schedule.sigma must be nonnegative");
    if (!(sb.kappa >= 0.0)) throw ConfigError("schedule.kappa must be nonnegative");

    if (doc.contains("lambda")) c.lambda = parse_lambda(doc.at("lambda"));
    c.rule = doc.contains("rule") ? parse_rule(doc.at("rule"), mb.K) : ColouringRule::neutral(mb.K);
    if (doc.contains("drift")) c.drift = parse_drift(doc.at("drift"), mb.K, sb.kappa);
    if (doc.contains("experiment")) {
      if (!doc.at("experiment").is_object()) throw ConfigError("experiment must be an object");
      c.experiment = doc.at("experiment");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return c;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

}  // namespace lwf
