#pragma once

// Scenario files: JSON with explicit matrix row arrays and zonotopes written
// as {center, generators}. Schema version 1. Parse errors carry the offending
// field path.

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "zonokit/attacks.hpp"
#include "zonokit/errors.hpp"
#include "zonokit/estimator.hpp"
#include "zonokit/model.hpp"

namespace zonokit {

using Json = nlohmann::json;

enum class InputKind { constant, uniform };

struct InputPolicy {
  InputKind kind = InputKind::constant;
  Vector constant;              // kind == constant
  std::optional<Zonotope> set;  // kind == uniform

  Vector sample(Rng& rng) const {
    if (kind == InputKind::constant) return constant;
    return sample_point(*set, rng);
  }

  /// Worst-case ||u||_inf, used when estimating the state bound.
  double bound() const {
    if (kind == InputKind::constant) return inf_norm(constant);
    const IntervalBox h = interval_hull(*set);
    return std::max(inf_norm(h.lower), inf_norm(h.upper));
  }

  int dim() const { return kind == InputKind::constant ? static_cast<int>(constant.size()) : set->dim(); }
};

struct ScenarioConfig {
  std::string name;
  Matrix a;
  Matrix b;
  std::vector<Matrix> sensor_outputs;
  std::vector<Zonotope> sensor_noises;
  Zonotope process_noise{Vector::Zero(1), Matrix::Zero(1, 0)};
  Zonotope initial_set{Vector::Zero(1), Matrix::Zero(1, 0)};
  std::optional<double> state_bound;
  int q = 0;
  InputPolicy input;
  AttackPolicy attack;
  int steps = 50;
  std::uint64_t seed = 0;
  PrunePolicy prune = PrunePolicy::merge_intersecting;
  int budget_max_members = 8;
  std::optional<double> reduction_order;
  std::optional<std::string> output_dir;
  Json echo;  // the parsed file, kept for report headers and snapshots

  SystemModel build_system() const {
    std::vector<SensorModel> sensors;
    for (std::size_t i = 0; i < sensor_outputs.size(); ++i)
      sensors.emplace_back(static_cast<int>(i) + 1, sensor_outputs[i], sensor_noises[i]);
    return SystemModel(a, b, std::move(sensors), process_noise, initial_set, state_bound);
  }

  EstimatorConfig estimator_config() const {
    EstimatorConfig cfg;
    cfg.max_attacked = q;
    cfg.policy = prune;
    cfg.budget_max_members = budget_max_members;
    cfg.reduction_order = reduction_order;
    return cfg;
  }
};

namespace detail {

[[noreturn]] inline void fail(const std::string& path, const std::string& what) {
  throw config_error("scenario config: " + path + ": " + what);
}

inline const Json& field(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) fail(path + "." + key, "missing");
  return j.at(key);
}

inline Matrix parse_matrix(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of row arrays");
  const std::size_t rows = j.size();
  const std::size_t cols = j.at(0).is_array() ? j.at(0).size() : 0;
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const Json& row = j.at(r);
    if (!row.is_array() || row.size() != cols) fail(path, "ragged or non-array matrix row");
    for (std::size_t c = 0; c < cols; ++c) {
      if (!row.at(c).is_number()) fail(path, "matrix entry is not a number");
      m(r, c) = row.at(c).get<double>();
    }
  }
  return m;
}

inline Vector parse_vector(const Json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  Vector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j.at(i).is_number()) fail(path, "vector entry is not a number");
    v(i) = j.at(i).get<double>();
  }
  return v;
}

inline Zonotope parse_zonotope(const Json& j, const std::string& path) {
  const Vector c = parse_vector(field(j, "center", path), path + ".center");
  Matrix g;
  const Json& gen = field(j, "generators", path);
  if (gen.is_array() && gen.empty()) {
    g = Matrix::Zero(c.size(), 0);
  } else {
    g = parse_matrix(gen, path + ".generators");
  }
  if (g.rows() != c.size()) fail(path, "generator rows must match center dimension");
  return Zonotope(c, g);
}

inline PrunePolicy parse_prune_kind(const std::string& s, const std::string& path) {
  if (s == "none") return PrunePolicy::none;
  if (s == "drop_empty_and_contained") return PrunePolicy::drop_empty_and_contained;
  if (s == "merge_intersecting") return PrunePolicy::merge_intersecting;
  if (s == "overbound_all") return PrunePolicy::overbound_all;
  if (s == "budget") return PrunePolicy::budget;
  fail(path, "unknown prune policy '" + s + "'");
}

inline AttackPolicy parse_attack(const Json& j, const std::string& path) {
  AttackPolicy pol;
  const std::string kind = field(j, "kind", path).get<std::string>();
  if (kind == "none") {
    pol.kind = AttackKind::none;
  } else if (kind == "large_bias") {
    pol.kind = AttackKind::large_bias;
    if (j.contains("bias")) pol.bias = j.at("bias").get<double>();
    if (j.contains("sensors"))
      for (const auto& s : j.at("sensors")) pol.target_sensors.push_back(s.get<int>());
  } else if (kind == "random_stealthy") {
    pol.kind = AttackKind::random_stealthy;
    if (j.contains("scale")) pol.stealth_scale = j.at("scale").get<double>();
  } else if (kind == "rotating") {
    pol.kind = AttackKind::rotating;
    if (j.contains("magnitudes"))
      for (const auto& m : j.at("magnitudes")) pol.rotating_magnitudes.push_back(m.get<double>());
  } else if (kind == "scripted") {
    pol.kind = AttackKind::scripted;
    for (const auto& e : field(j, "entries", path)) {
      ScriptEntry entry;
      entry.k = field(e, "k", path + ".entries").get<int>();
      entry.sensor = field(e, "sensor", path + ".entries").get<int>();
      entry.value = parse_vector(field(e, "value", path + ".entries"), path + ".entries.value");
      pol.script.push_back(std::move(entry));
    }
  } else {
    fail(path + ".kind", "unknown attack kind '" + kind + "'");
  }
  return pol;
}

}  // namespace detail

inline ScenarioConfig parse_config(const Json& j) {
  using detail::fail;
  using detail::field;
  ScenarioConfig cfg;
  cfg.echo = j;

  if (!j.is_object()) fail("$", "top level must be an object");
  const int schema = field(j, "schema", "$").get<int>();
  if (schema != 1) fail("$.schema", "unsupported schema version " + std::to_string(schema));
  cfg.name = j.value("name", std::string("scenario"));

  const Json& sys = field(j, "system", "$");
  cfg.a = detail::parse_matrix(field(sys, "a", "$.system"), "$.system.a");
  cfg.b = detail::parse_matrix(field(sys, "b", "$.system"), "$.system.b");
  cfg.process_noise =
      detail::parse_zonotope(field(sys, "process_noise", "$.system"), "$.system.process_noise");
  cfg.initial_set =
      detail::parse_zonotope(field(sys, "initial_set", "$.system"), "$.system.initial_set");
  const Json& sensors = field(sys, "sensors", "$.system");
  if (!sensors.is_array() || sensors.empty()) fail("$.system.sensors", "expected a non-empty array");
  for (std::size_t i = 0; i < sensors.size(); ++i) {
    const std::string path = "$.system.sensors[" + std::to_string(i) + "]";
    cfg.sensor_outputs.push_back(
        detail::parse_matrix(field(sensors.at(i), "output_matrix", path), path + ".output_matrix"));
    cfg.sensor_noises.push_back(
        detail::parse_zonotope(field(sensors.at(i), "noise", path), path + ".noise"));
  }

  if (j.contains("state_bound") && !j.at("state_bound").is_null())
    cfg.state_bound = j.at("state_bound").get<double>();
  cfg.q = field(j, "q", "$").get<int>();

  const Json& input = field(j, "input", "$");
  const std::string input_kind = field(input, "kind", "$.input").get<std::string>();
  if (input_kind == "constant") {
    cfg.input.kind = InputKind::constant;
    cfg.input.constant = detail::parse_vector(field(input, "value", "$.input"), "$.input.value");
  } else if (input_kind == "uniform") {
    cfg.input.kind = InputKind::uniform;
    cfg.input.set = detail::parse_zonotope(field(input, "set", "$.input"), "$.input.set");
  } else {
    fail("$.input.kind", "unknown input kind '" + input_kind + "'");
  }
  if (cfg.input.dim() != cfg.b.cols()) fail("$.input", "input dimension must match B columns");

  cfg.attack = detail::parse_attack(field(j, "attack", "$"), "$.attack");
  cfg.steps = j.value("steps", 50);
  if (cfg.steps < 1) fail("$.steps", "must be >= 1");
  cfg.seed = j.value("seed", std::uint64_t{0});

  if (j.contains("prune")) {
    const Json& pr = j.at("prune");
    if (pr.is_string()) {
      cfg.prune = detail::parse_prune_kind(pr.get<std::string>(), "$.prune");
    } else if (pr.is_object()) {
      cfg.prune = detail::parse_prune_kind(field(pr, "kind", "$.prune").get<std::string>(), "$.prune");
      if (cfg.prune == PrunePolicy::budget)
        cfg.budget_max_members = field(pr, "max_members", "$.prune").get<int>();
    } else {
      fail("$.prune", "expected a string or an object");
    }
  }
  if (j.contains("reduction_order") && !j.at("reduction_order").is_null())
    cfg.reduction_order = j.at("reduction_order").get<double>();
  if (j.contains("output_dir") && !j.at("output_dir").is_null())
    cfg.output_dir = j.at("output_dir").get<std::string>();
  return cfg;
}

/// Parses a scenario file and checks schema + attack-policy consistency, but
/// leaves the standing-assumption verdict to the caller.
inline ScenarioConfig load_config_unvalidated(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("scenario config: cannot open '" + path + "'");
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw config_error("scenario config: '" + path + "' is not valid JSON: " + e.what());
  }
  ScenarioConfig cfg = parse_config(j);
  validate_policy(cfg.attack, cfg.build_system().sensors, cfg.q);
  return cfg;
}

/// Parses and fully validates a scenario file; assumption failures are
/// reported as config errors so a bad file never reaches the simulation loop.
inline ScenarioConfig load_config(const std::string& path) {
  ScenarioConfig cfg = load_config_unvalidated(path);
  const AssumptionReport rep = validate_assumptions(cfg.build_system(), cfg.q);
  if (!rep.all_ok())
    throw config_error("scenario config: assumption check failed:\n" + rep.summary());
  return cfg;
}

/// CLI-style prune spec: a policy name, or "budget:N".
inline void apply_prune_spec(ScenarioConfig& cfg, const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) {
    cfg.prune = detail::parse_prune_kind(spec, "--prune");
    return;
  }
  cfg.prune = detail::parse_prune_kind(spec.substr(0, colon), "--prune");
  if (cfg.prune != PrunePolicy::budget) detail::fail("--prune", "only budget takes a parameter");
  cfg.budget_max_members = std::stoi(spec.substr(colon + 1));
}

}  // namespace zonokit
