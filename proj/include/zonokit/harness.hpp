#pragma once

// Closed-loop scenario runner: plant + attacker + filter, with per-step
// telemetry, JSONL/CSV emission, and aggregate metrics.
//
// Determinism contract: a fixed config + seed reproduces the run bit for bit.
// Per step, random draws happen in a fixed order (input u, process noise w,
// attack policy draws, then sensor noises v_1..v_p), doubles are serialized
// with a fixed %.17g rule, and JSONL keys have a fixed order. Wall-clock time
// is therefore kept out of the JSONL stream; it only appears in the CSV.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "zonokit/attacks.hpp"
#include "zonokit/estimator.hpp"
#include "zonokit/model.hpp"
#include "zonokit/scenario.hpp"

namespace zonokit {

struct SensorRecord {
  Vector y;
  bool attacked = false;
  Vector attack;  // injected signal (ground truth)
};

struct CandidateRecord {
  std::vector<int> sensors;
  bool empty = false;
};

struct MemberRecord {
  ConstrainedZonotope set;
  std::vector<int> provenance;
};

struct StepRecord {
  int k = 0;
  Vector u;       // input driving the transition into step k
  Vector x_true;  // ground truth, never visible to the filter
  std::vector<SensorRecord> sensors;
  std::vector<CandidateRecord> candidates;
  std::vector<MemberRecord> members;
  std::vector<int> detected;  // D_k snapshot
  Vector bound_center;
  double bound_radius = 0.0;
  bool inclusion = false;  // union of members contains x_true
  double wall_millis = 0.0;
};

struct RunReport {
  ScenarioConfig config;
  double m_bound = 0.0;  // the M actually used
  Vector x0;
  std::vector<StepRecord> steps;

  // Aggregates.
  int max_members = 0;
  double inclusion_rate = 0.0;
  int first_detection_k = -1;  // -1: nothing ever detected
  double mean_bound_radius = 0.0;
  bool invariants_ok = false;  // inclusion rate 1.0 and error bound valid at every step
};

inline RunReport run_scenario(const ScenarioConfig& cfg) {
  SystemModel sys = cfg.build_system();
  validate_policy(cfg.attack, sys.sensors, cfg.q);
  const AssumptionReport rep = validate_assumptions(sys, cfg.q);
  if (!rep.all_ok()) throw config_error("run_scenario: assumption check failed:\n" + rep.summary());
  if (!sys.state_bound) sys.state_bound = estimate_state_bound(sys, cfg.input.bound());

  RunReport report;
  report.config = cfg;
  report.m_bound = *sys.state_bound;

  Rng rng(cfg.seed);
  PlantState plant{0, sample_point(sys.initial_set, rng)};
  report.x0 = plant.x;

  const EstimatorConfig est_cfg = cfg.estimator_config();
  EstimateCollection coll = init(sys, est_cfg);
  DetectionState det;

  const int p = sys.sensor_count();
  bool all_included = true;
  bool bounds_ok = true;
  double radius_sum = 0.0;

  for (int k = 1; k <= cfg.steps; ++k) {
    const Vector u = cfg.input.sample(rng);
    const Vector w = sample_point(sys.process_noise, rng);
    plant = plant_step(sys, plant, u, w);

    const AttackSample attack = evaluate(cfg.attack, k, rng, sys.sensors, cfg.q, report.m_bound);

    std::vector<Vector> ys(p);
    StepRecord rec;
    rec.k = k;
    rec.u = u;
    rec.x_true = plant.x;
    rec.sensors.resize(p);
    for (int i = 0; i < p; ++i) {
      const Vector v = sample_point(sys.sensors[i].noise, rng);
      ys[i] = measure(sys.sensors[i], plant.x, v, attack.injected[i]);
      rec.sensors[i].y = ys[i];
      rec.sensors[i].attack = attack.injected[i];
      rec.sensors[i].attacked =
          std::find(attack.attacked_ids.begin(), attack.attacked_ids.end(), i + 1) !=
          attack.attacked_ids.end();
    }

    const auto t0 = std::chrono::steady_clock::now();
    StepResult res = step(coll, det, sys, est_cfg, u, ys);
    const auto t1 = std::chrono::steady_clock::now();
    rec.wall_millis = std::chrono::duration<double, std::milli>(t1 - t0).count();

    coll = std::move(res.collection);
    det = std::move(res.detection);

    for (std::size_t h = 0; h < res.telemetry.subsets.size(); ++h)
      rec.candidates.push_back(
          {res.telemetry.subsets[h].sensors, res.telemetry.candidate_empty[h] != 0});
    for (const auto& m : coll.members) rec.members.push_back({m.set, m.provenance});
    rec.detected.assign(det.detected.begin(), det.detected.end());
    rec.bound_center = res.bound.center;
    rec.bound_radius = res.bound.radius;

    rec.inclusion = false;
    for (const auto& m : coll.members) {
      if (contains_point(m.set, plant.x)) {
        rec.inclusion = true;
        break;
      }
    }
    all_included = all_included && rec.inclusion;
    bounds_ok = bounds_ok && (rec.bound_center - plant.x).norm() <= rec.bound_radius + 1e-9;
    radius_sum += rec.bound_radius;
    report.max_members = std::max(report.max_members, static_cast<int>(coll.members.size()));
    if (report.first_detection_k < 0 && !det.detected.empty()) report.first_detection_k = k;
    report.steps.push_back(std::move(rec));
  }

  report.inclusion_rate =
      report.steps.empty()
          ? 1.0
          : static_cast<double>(std::count_if(report.steps.begin(), report.steps.end(),
                                              [](const StepRecord& r) { return r.inclusion; })) /
                static_cast<double>(report.steps.size());
  report.mean_bound_radius = report.steps.empty() ? 0.0 : radius_sum / report.steps.size();
  report.invariants_ok = all_included && bounds_ok;
  return report;
}

// ---------------------------------------------------------------------------
// serialization

namespace jsonl {

inline void put_double(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

inline void put_vector(std::string& out, const Vector& v) {
  out += '[';
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    put_double(out, v(i));
  }
  out += ']';
}

inline void put_matrix(std::string& out, const Matrix& m) {
  out += '[';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    if (r) out += ',';
    out += '[';
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out += ',';
      put_double(out, m(r, c));
    }
    out += ']';
  }
  out += ']';
}

inline void put_ints(std::string& out, const std::vector<int>& v) {
  out += '[';
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  out += ']';
}

inline std::string step_line(const StepRecord& r) {
  std::string out;
  out.reserve(1024);
  out += "{\"k\":" + std::to_string(r.k);
  out += ",\"u\":";
  put_vector(out, r.u);
  out += ",\"x_true\":";
  put_vector(out, r.x_true);
  out += ",\"sensors\":[";
  for (std::size_t i = 0; i < r.sensors.size(); ++i) {
    if (i) out += ',';
    out += "{\"y\":";
    put_vector(out, r.sensors[i].y);
    out += ",\"attacked\":";
    out += r.sensors[i].attacked ? "true" : "false";
    out += ",\"attack\":";
    put_vector(out, r.sensors[i].attack);
    out += '}';
  }
  out += "],\"candidates\":[";
  for (std::size_t i = 0; i < r.candidates.size(); ++i) {
    if (i) out += ',';
    out += "{\"sensors\":";
    put_ints(out, r.candidates[i].sensors);
    out += ",\"empty\":";
    out += r.candidates[i].empty ? "true" : "false";
    out += '}';
  }
  out += "],\"members\":[";
  for (std::size_t i = 0; i < r.members.size(); ++i) {
    if (i) out += ',';
    const auto& m = r.members[i];
    out += "{\"center\":";
    put_vector(out, m.set.center);
    out += ",\"generators\":";
    put_matrix(out, m.set.generators);
    out += ",\"constraint_lhs\":";
    put_matrix(out, m.set.constraint_lhs);
    out += ",\"constraint_rhs\":";
    put_vector(out, m.set.constraint_rhs);
    out += ",\"provenance\":";
    put_ints(out, m.provenance);
    out += '}';
  }
  out += "],\"detected\":";
  put_ints(out, r.detected);
  out += ",\"bound\":{\"center\":";
  put_vector(out, r.bound_center);
  out += ",\"radius\":";
  put_double(out, r.bound_radius);
  out += "},\"inclusion\":";
  out += r.inclusion ? "true" : "false";
  out += '}';
  return out;
}

inline std::string header_line(const RunReport& rep) {
  std::string out = "{\"schema\":1,\"name\":\"" + rep.config.name + "\"";
  out += ",\"seed\":" + std::to_string(rep.config.seed);
  out += ",\"steps\":" + std::to_string(rep.config.steps);
  out += ",\"m_bound\":";
  put_double(out, rep.m_bound);
  out += ",\"x0\":";
  put_vector(out, rep.x0);
  // The config echo uses nlohmann's canonical dump: stable key order and
  // round-trip number formatting.
  out += ",\"config\":" + rep.config.echo.dump();
  out += '}';
  return out;
}

}  // namespace jsonl

/// One header object, then one JSON object per step.
inline void emit_jsonl(const RunReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("emit_jsonl: cannot open '" + path + "'");
  out << jsonl::header_line(report) << '\n';
  for (const auto& step : report.steps) out << jsonl::step_line(step) << '\n';
}

/// Columns: k, members, radius, detected_count, inclusion, millis.
inline void emit_csv_metrics(const RunReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("emit_csv_metrics: cannot open '" + path + "'");
  out << "k,members,radius,detected_count,inclusion,millis\n";
  for (const auto& r : report.steps) {
    std::string line = std::to_string(r.k) + "," + std::to_string(r.members.size()) + ",";
    jsonl::put_double(line, r.bound_radius);
    line += "," + std::to_string(r.detected.size()) + ",";
    line += r.inclusion ? "1" : "0";
    line += ",";
    jsonl::put_double(line, r.wall_millis);
    out << line << '\n';
  }
}

// ---------------------------------------------------------------------------
// report loading (for snapshot rendering)

inline RunReport load_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_report: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("load_report: empty report");
  Json header = Json::parse(line);
  RunReport rep;
  rep.config = parse_config(header.at("config"));
  rep.m_bound = header.at("m_bound").get<double>();
  rep.x0 = detail::parse_vector(header.at("x0"), "$.x0");

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Json j = Json::parse(line);
    StepRecord rec;
    rec.k = j.at("k").get<int>();
    rec.u = detail::parse_vector(j.at("u"), "u");
    rec.x_true = detail::parse_vector(j.at("x_true"), "x_true");
    for (const auto& s : j.at("sensors")) {
      SensorRecord sr;
      sr.y = detail::parse_vector(s.at("y"), "y");
      sr.attacked = s.at("attacked").get<bool>();
      sr.attack = detail::parse_vector(s.at("attack"), "attack");
      rec.sensors.push_back(std::move(sr));
    }
    for (const auto& c : j.at("candidates")) {
      CandidateRecord cr;
      for (const auto& id : c.at("sensors")) cr.sensors.push_back(id.get<int>());
      cr.empty = c.at("empty").get<bool>();
      rec.candidates.push_back(std::move(cr));
    }
    for (const auto& m : j.at("members")) {
      const Vector center = detail::parse_vector(m.at("center"), "center");
      auto mat_or_empty = [&](const Json& mj, Eigen::Index rows_hint) {
        if (mj.is_array() && mj.empty()) return Matrix(Matrix::Zero(rows_hint, 0));
        return detail::parse_matrix(mj, "members");
      };
      const Matrix gens = mat_or_empty(m.at("generators"), center.size());
      const Vector crhs = detail::parse_vector(m.at("constraint_rhs"), "constraint_rhs");
      Matrix clhs = m.at("constraint_lhs").is_array() && m.at("constraint_lhs").empty()
                        ? Matrix::Zero(0, gens.cols())
                        : detail::parse_matrix(m.at("constraint_lhs"), "constraint_lhs");
      MemberRecord mr{ConstrainedZonotope(center, gens, clhs, crhs), {}};
      for (const auto& id : m.at("provenance")) mr.provenance.push_back(id.get<int>());
      rec.members.push_back(std::move(mr));
    }
    for (const auto& id : j.at("detected")) rec.detected.push_back(id.get<int>());
    rec.bound_center = detail::parse_vector(j.at("bound").at("center"), "bound.center");
    rec.bound_radius = j.at("bound").at("radius").get<double>();
    rec.inclusion = j.at("inclusion").get<bool>();
    rep.steps.push_back(std::move(rec));
  }
  return rep;
}

}  // namespace zonokit
