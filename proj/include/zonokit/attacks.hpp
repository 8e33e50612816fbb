#pragma once

// Attack-policy generators. A policy decides, per step, which sensors are
// compromised (at most q of them) and what signal each receives. The trace is
// ground truth for the test harness and is never visible to the filter.

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "zonokit/errors.hpp"
#include "zonokit/model.hpp"
#include "zonokit/rng.hpp"
#include "zonokit/setops.hpp"

namespace zonokit {

enum class AttackKind { none, large_bias, random_stealthy, rotating, scripted };

struct ScriptEntry {
  int k;
  int sensor;  // 1-based
  Vector value;
};

struct AttackPolicy {
  AttackKind kind = AttackKind::none;

  // large_bias: per-step constant offset bias * ones on fixed target sensors.
  std::optional<double> bias;        // default 1e3 * M
  std::vector<int> target_sensors;   // default {1, ..., q}

  // random_stealthy: vectors sampled inside scale * V_i on a fresh random
  // subset of q sensors each step.
  double stealth_scale = 1.0;        // in (0, 1]

  // rotating: sensor 1 + (k mod p) gets magnitude[k mod p] * ones.
  std::vector<double> rotating_magnitudes;  // size p; default 2.0 each

  std::vector<ScriptEntry> script;

  static AttackPolicy none_policy() { return {}; }
};

struct AttackSample {
  std::vector<Vector> injected;   // per sensor, zero when clean
  std::vector<int> attacked_ids;  // ascending
  std::vector<int> safe_ids;      // complement: the uncompromised set S_k
};

struct AttackTrace {
  std::vector<AttackSample> steps;  // index 0 <-> k = 1

  const AttackSample& at_step(int k) const { return steps.at(k - 1); }

  /// Sensors never attacked anywhere in the trace.
  std::vector<int> never_attacked(int p) const {
    std::vector<char> hit(p + 1, false);
    for (const auto& s : steps)
      for (int id : s.attacked_ids) hit[id] = true;
    std::vector<int> out;
    for (int i = 1; i <= p; ++i)
      if (!hit[i]) out.push_back(i);
    return out;
  }
};

inline void validate_policy(const AttackPolicy& pol, const std::vector<SensorModel>& sensors, int q) {
  const int p = static_cast<int>(sensors.size());
  if (pol.kind != AttackKind::none && q < 1)
    throw config_error("attack policy: q must be >= 1 for any attacking policy");
  if (pol.kind == AttackKind::large_bias) {
    for (int id : pol.target_sensors)
      if (id < 1 || id > p) throw config_error("attack policy: large_bias sensor id out of range");
    if (static_cast<int>(pol.target_sensors.size()) > q && !pol.target_sensors.empty())
      throw config_error("attack policy: large_bias targets exceed q");
  }
  if (pol.kind == AttackKind::random_stealthy &&
      !(pol.stealth_scale > 0.0 && pol.stealth_scale <= 1.0))
    throw config_error("attack policy: stealth scale must lie in (0, 1]");
  if (pol.kind == AttackKind::rotating && !pol.rotating_magnitudes.empty() &&
      static_cast<int>(pol.rotating_magnitudes.size()) != p)
    throw config_error("attack policy: rotating magnitudes must have one entry per sensor");
  if (pol.kind == AttackKind::scripted) {
    for (const auto& e : pol.script) {
      if (e.sensor < 1 || e.sensor > p)
        throw config_error("attack policy: scripted sensor id out of range");
      if (e.value.size() != sensors[e.sensor - 1].output_dim())
        throw config_error("attack policy: scripted vector dimension mismatch for sensor " +
                           std::to_string(e.sensor));
    }
    // Per-step budget check over the whole script.
    std::vector<std::pair<int, int>> seen;
    for (const auto& e : pol.script) seen.emplace_back(e.k, e.sensor);
    std::sort(seen.begin(), seen.end());
    int run = 0;
    for (std::size_t i = 0; i < seen.size(); ++i) {
      run = (i > 0 && seen[i].first == seen[i - 1].first) ? run + 1 : 1;
      if (run > q)
        throw config_error("attack policy: script attacks more than q sensors at k = " +
                           std::to_string(seen[i].first));
    }
  }
}

/// Evaluates the policy at step k. The attacked set never exceeds q sensors.
inline AttackSample evaluate(const AttackPolicy& pol, int k, Rng& rng,
                             const std::vector<SensorModel>& sensors, int q, double m_bound) {
  const int p = static_cast<int>(sensors.size());
  AttackSample out;
  out.injected.reserve(p);
  for (const auto& s : sensors) out.injected.push_back(Vector::Zero(s.output_dim()));

  switch (pol.kind) {
    case AttackKind::none:
      break;
    case AttackKind::large_bias: {
      std::vector<int> targets = pol.target_sensors;
      if (targets.empty())
        for (int i = 1; i <= q; ++i) targets.push_back(i);
      const double bias = pol.bias.value_or(1e3 * m_bound);
      for (int id : targets) {
        out.injected[id - 1].setConstant(bias);
        out.attacked_ids.push_back(id);
      }
      break;
    }
    case AttackKind::random_stealthy: {
      out.attacked_ids = rng.choose(p, q);
      for (int id : out.attacked_ids) {
        const Zonotope& v = sensors[id - 1].noise;
        const Zonotope scaled(pol.stealth_scale * v.center, pol.stealth_scale * v.generators);
        out.injected[id - 1] = sample_point(scaled, rng);
      }
      break;
    }
    case AttackKind::rotating: {
      const int phase = k % p;
      const int id = 1 + phase;
      const double mag =
          pol.rotating_magnitudes.empty() ? 2.0 : pol.rotating_magnitudes[phase];
      out.injected[id - 1].setConstant(mag);
      out.attacked_ids.push_back(id);
      break;
    }
    case AttackKind::scripted: {
      for (const auto& e : pol.script) {
        if (e.k != k) continue;
        out.injected[e.sensor - 1] = e.value;
        out.attacked_ids.push_back(e.sensor);
      }
      std::sort(out.attacked_ids.begin(), out.attacked_ids.end());
      break;
    }
  }

  if (static_cast<int>(out.attacked_ids.size()) > q)
    throw config_error("attack policy attacked more than q sensors in one step");
  std::vector<char> hit(p + 1, false);
  for (int id : out.attacked_ids) hit[id] = true;
  for (int i = 1; i <= p; ++i)
    if (!hit[i]) out.safe_ids.push_back(i);
  return out;
}

}  // namespace zonokit
