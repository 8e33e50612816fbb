#pragma once

// Resilient zonotope-based state estimator. Each step:
//   1. time update     X_pred = A X ⊕ B u ⊕ W            (per member)
//   2. consistent sets Y_i from each sensor measurement
//   3. candidates      I_h = intersection of Y_j over each (p-q)-subset J_h
//   4. measurement     members = nonempty {pred ∩ I_h} over the full product
//   5. prune           policy-driven complexity reduction (union-preserving)
//   6. detect          sensors whose Y_i is isolated from the prediction and
//                      from every other Y_j (meaningful for time-invariant attacks)
//   7. error bound     box overbound of the collection; its center estimates x
// The union of members is guaranteed to contain the true state as long as at
// most q sensors are attacked per step.

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "zonokit/errors.hpp"
#include "zonokit/model.hpp"
#include "zonokit/setops.hpp"

namespace zonokit {

struct SubsetIndex {
  int h = 0;                 // 1-based position in the enumeration
  std::vector<int> sensors;  // ascending, |sensors| = p - q
};

enum class PrunePolicy { none, drop_empty_and_contained, merge_intersecting, overbound_all, budget };

struct EstimatorConfig {
  int max_attacked = 0;  // q
  PrunePolicy policy = PrunePolicy::drop_empty_and_contained;
  int budget_max_members = 8;                  // used by PrunePolicy::budget
  std::optional<double> reduction_order;       // generator cap per member when set
};

struct Member {
  ConstrainedZonotope set;
  std::vector<int> provenance;  // sensors of the candidate that produced it; empty after merging
};

struct EstimateCollection {
  int k = 0;
  std::vector<Member> members;

  std::vector<ConstrainedZonotope> sets() const {
    std::vector<ConstrainedZonotope> out;
    out.reserve(members.size());
    for (const auto& m : members) out.push_back(m.set);
    return out;
  }
};

struct DetectionEvent {
  int k;
  int sensor;
  enum class Clause { misses_prediction, isolated_from_peers } clause;
};

struct DetectionState {
  std::set<int> detected;  // accumulates; never shrinks
  std::vector<DetectionEvent> evidence;
};

struct ErrorBound {
  Vector center;
  double radius = 0.0;
};

struct StepTelemetry {
  std::vector<Zonotope> consistent;              // per sensor
  std::vector<ConstrainedZonotope> predicted;    // per previous member
  std::vector<SubsetIndex> subsets;
  std::vector<char> candidate_empty;             // aligned with subsets
  int products_total = 0;
  int products_kept = 0;
};

struct StepResult {
  EstimateCollection collection;
  DetectionState detection;
  ErrorBound bound;
  StepTelemetry telemetry;
};

// ---------------------------------------------------------------------------

/// X_hat(0|0) = X_0 as a single unconstrained member.
inline EstimateCollection init(const SystemModel& sys, const EstimatorConfig&) {
  EstimateCollection coll;
  coll.k = 0;
  coll.members.push_back({ConstrainedZonotope(sys.initial_set), {}});
  return coll;
}

/// Propagates every member through the dynamics: A m ⊕ B u ⊕ W.
inline std::vector<ConstrainedZonotope> time_update(const EstimateCollection& coll,
                                                    const SystemModel& sys, const Vector& u) {
  const Vector shift = sys.b * u;
  const ConstrainedZonotope noise{sys.process_noise};
  std::vector<ConstrainedZonotope> out;
  out.reserve(coll.members.size());
  for (const auto& m : coll.members)
    out.push_back(minkowski_sum(translate(linear_map(sys.a, m.set), shift), noise));
  return out;
}

/// State-space region consistent with one measurement:
///   < C_i^+ (y - c_v), [C_i^+ G_v,  M * ker(C_i)] >
/// The kernel block spans the directions the sensor cannot see, bounded by the
/// state bound M.
inline Zonotope consistent_set(const SensorModel& sensor, const Vector& y, double m_bound) {
  if (y.size() != sensor.output_dim())
    throw std::invalid_argument("consistent_set: measurement dimension mismatch");
  const int n = static_cast<int>(sensor.output_matrix.cols());
  const Vector center = sensor.pinv * (y - sensor.noise.center);
  const Matrix noise_part = sensor.pinv * sensor.noise.generators;
  Matrix gens(n, noise_part.cols() + sensor.kernel.cols());
  gens << noise_part, m_bound * sensor.kernel;
  return Zonotope(center, std::move(gens));
}

/// All sensor subsets of size p - q, lexicographically ordered.
inline std::vector<SubsetIndex> enumerate_subsets(int p, int q) {
  if (p < 1 || q < 0 || q >= p)
    throw std::invalid_argument("enumerate_subsets: need p >= 1 and 0 <= q < p");
  const int size = p - q;
  std::vector<SubsetIndex> out;
  std::vector<int> pick(size);
  for (int i = 0; i < size; ++i) pick[i] = i + 1;
  while (true) {
    out.push_back({static_cast<int>(out.size()) + 1, pick});
    int i = size - 1;
    while (i >= 0 && pick[i] == p - (size - 1 - i)) --i;
    if (i < 0) break;
    ++pick[i];
    for (int j = i + 1; j < size; ++j) pick[j] = pick[j - 1] + 1;
  }
  return out;
}

/// One candidate per subset: the intersection of its consistent sets.
/// Empty candidates are kept here; the measurement update drops them.
inline std::vector<ConstrainedZonotope> candidate_intersections(
    const std::vector<Zonotope>& consistent, const std::vector<SubsetIndex>& subsets) {
  std::vector<ConstrainedZonotope> out;
  out.reserve(subsets.size());
  for (const auto& subset : subsets) {
    ConstrainedZonotope acc{consistent.at(subset.sensors.front() - 1)};
    for (std::size_t i = 1; i < subset.sensors.size(); ++i)
      acc = intersect(acc, ConstrainedZonotope(consistent.at(subset.sensors[i] - 1)));
    out.push_back(std::move(acc));
  }
  return out;
}

struct MeasurementDiagnostics {
  std::vector<char> candidate_empty;
  int products_total = 0;
  int products_kept = 0;
};

/// Full Cartesian product of (predicted member x candidate) intersections with
/// empty results dropped, assembled in (predicted index, subset index) order.
/// Throws invariant_violation when nothing survives: under the standing
/// assumptions that cannot happen, so it certifies an assumption breach.
inline EstimateCollection measurement_update(const std::vector<ConstrainedZonotope>& predicted,
                                             const std::vector<ConstrainedZonotope>& candidates,
                                             const std::vector<SubsetIndex>& subsets,
                                             const EstimatorConfig&, int k,
                                             MeasurementDiagnostics* diag = nullptr) {
  if (candidates.size() != subsets.size())
    throw std::invalid_argument("measurement_update: candidates/subsets size mismatch");
  std::vector<char> cand_empty(candidates.size(), false);
  for (std::size_t h = 0; h < candidates.size(); ++h) cand_empty[h] = is_empty(candidates[h]);

  EstimateCollection next;
  next.k = k;
  int total = 0;
  for (std::size_t pi = 0; pi < predicted.size(); ++pi) {
    for (std::size_t h = 0; h < candidates.size(); ++h) {
      ++total;
      if (cand_empty[h]) continue;
      ConstrainedZonotope cut = intersect(predicted[pi], candidates[h]);
      if (is_empty(cut)) continue;
      next.members.push_back({std::move(cut), subsets[h].sensors});
    }
  }
  if (diag) {
    diag->candidate_empty = cand_empty;
    diag->products_total = total;
    diag->products_kept = static_cast<int>(next.members.size());
  }
  if (next.members.empty())
    throw invariant_violation(
        "measurement update produced an empty collection at k = " + std::to_string(k) +
        "; more sensors appear attacked than the budget q allows");
  return next;
}

// ---------------------------------------------------------------------------
// pruning

namespace detail {

inline EstimateCollection drop_contained(const EstimateCollection& coll) {
  const auto& ms = coll.members;
  std::vector<char> dropped(ms.size(), false);
  std::vector<char> empty(ms.size(), false);
  for (std::size_t i = 0; i < ms.size(); ++i) {
    empty[i] = is_empty(ms[i].set);
    dropped[i] = empty[i];
  }
  for (std::size_t i = ms.size(); i-- > 0;) {
    if (dropped[i]) continue;
    for (std::size_t j = 0; j < ms.size(); ++j) {
      if (j == i || dropped[j]) continue;
      if (contains_set_sufficient(ms[i].set, ms[j].set)) {
        dropped[i] = true;
        break;
      }
    }
  }
  EstimateCollection out;
  out.k = coll.k;
  for (std::size_t i = 0; i < ms.size(); ++i)
    if (!dropped[i]) out.members.push_back(ms[i]);
  if (out.members.empty()) out = coll;  // all-empty cannot happen for valid input
  return out;
}

/// Partitions members into intersection-connected groups and replaces each
/// multi-member group by its box overbound.
inline EstimateCollection merge_intersecting(const EstimateCollection& coll) {
  const auto sets = coll.sets();
  const std::size_t m = sets.size();
  std::vector<std::size_t> parent(m);
  for (std::size_t i = 0; i < m; ++i) parent[i] = i;
  std::function<std::size_t(std::size_t)> find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      if (find(i) != find(j) && !is_empty(intersect(sets[i], sets[j])))
        parent[find(i)] = find(j);

  std::map<std::size_t, std::vector<std::size_t>> groups;  // keyed by smallest member index
  for (std::size_t i = 0; i < m; ++i) groups[find(i)].push_back(i);
  std::vector<std::pair<std::size_t, std::vector<std::size_t>>> ordered;
  for (auto& [root, idx] : groups) ordered.emplace_back(*std::min_element(idx.begin(), idx.end()), idx);
  std::sort(ordered.begin(), ordered.end());

  EstimateCollection out;
  out.k = coll.k;
  for (const auto& [first, idx] : ordered) {
    if (idx.size() == 1) {
      out.members.push_back(coll.members[idx.front()]);
    } else {
      std::vector<ConstrainedZonotope> group;
      for (std::size_t i : idx) group.push_back(sets[i]);
      out.members.push_back({overbound_union(group), {}});
    }
  }
  return out;
}

}  // namespace detail

/// Union-preserving complexity reduction. Every policy keeps the guarantee
/// that the union of members still contains everything it contained before.
inline EstimateCollection prune(const EstimateCollection& coll, const EstimatorConfig& cfg) {
  switch (cfg.policy) {
    case PrunePolicy::none:
      return coll;
    case PrunePolicy::drop_empty_and_contained:
      return detail::drop_contained(coll);
    case PrunePolicy::merge_intersecting:
      return detail::merge_intersecting(coll);
    case PrunePolicy::overbound_all: {
      EstimateCollection out;
      out.k = coll.k;
      out.members.push_back({overbound_union(coll.sets()), {}});
      return out;
    }
    case PrunePolicy::budget: {
      if (cfg.budget_max_members < 1)
        throw std::invalid_argument("prune: budget must allow at least one member");
      EstimateCollection cur = coll;
      while (static_cast<int>(cur.members.size()) > cfg.budget_max_members) {
        EstimateCollection merged = detail::merge_intersecting(cur);
        if (merged.members.size() >= cur.members.size()) {
          EstimateCollection out;
          out.k = cur.k;
          out.members.push_back({overbound_union(cur.sets()), {}});
          return out;
        }
        cur = std::move(merged);
      }
      return cur;
    }
  }
  return coll;
}

/// Single box containing the whole collection; the bound
/// ||center - x_true|| <= radius then holds whenever some member contains x_true.
inline ErrorBound error_bound(const EstimateCollection& coll) {
  const ConstrainedZonotope box = overbound_union(coll.sets());
  return {box.center, radius(box)};
}

/// Detector for time-invariant attacks: sensor i is flagged when its
/// consistent set misses every predicted member, or misses the consistent set
/// of every other sensor. Flags accumulate, so |D_k| is non-decreasing.
inline DetectionState detect(const std::vector<Zonotope>& consistent,
                             const std::vector<ConstrainedZonotope>& predicted,
                             const DetectionState& det, int k) {
  DetectionState out = det;
  const int p = static_cast<int>(consistent.size());
  for (int i = 0; i < p; ++i) {
    if (out.detected.count(i + 1)) continue;
    const ConstrainedZonotope yi{consistent[i]};
    bool misses_prediction = true;
    for (const auto& pred : predicted) {
      if (!is_empty(intersect(yi, pred))) {
        misses_prediction = false;
        break;
      }
    }
    bool isolated = p > 1;
    if (!misses_prediction) {
      for (int j = 0; j < p && isolated; ++j) {
        if (j == i) continue;
        if (!is_empty(intersect(yi, ConstrainedZonotope(consistent[j])))) isolated = false;
      }
    }
    if (misses_prediction || isolated) {
      out.detected.insert(i + 1);
      out.evidence.push_back({k, i + 1,
                              misses_prediction ? DetectionEvent::Clause::misses_prediction
                                                : DetectionEvent::Clause::isolated_from_peers});
    }
  }
  return out;
}

namespace detail {

/// Keeps member representations bounded: constraint rows are first compressed
/// to their rank, then substituted away down to 4 * n_x rows, and generators
/// are Girard-capped when a reduction order is configured. All three steps
/// yield enclosures.
inline ConstrainedZonotope tighten_representation(ConstrainedZonotope m,
                                                  const EstimatorConfig& cfg, int state_dim) {
  const int row_cap = 4 * state_dim;
  if (m.constraint_count() > row_cap) m = drop_redundant_constraints(m);
  if (m.constraint_count() > row_cap) m = eliminate_constraints(m, row_cap);
  if (cfg.reduction_order) m = reduce_generators(m, *cfg.reduction_order);
  return m;
}

}  // namespace detail

/// One full filter step; k advances by one.
inline StepResult step(const EstimateCollection& coll, const DetectionState& det,
                       const SystemModel& sys, const EstimatorConfig& cfg, const Vector& u,
                       const std::vector<Vector>& measurements) {
  if (static_cast<int>(measurements.size()) != sys.sensor_count())
    throw std::invalid_argument("step: one measurement per sensor required");
  if (!sys.state_bound)
    throw std::invalid_argument("step: system state bound M must be set before filtering");
  const int k = coll.k + 1;
  const int p = sys.sensor_count();

  StepResult res;
  res.telemetry.predicted = time_update(coll, sys, u);

  res.telemetry.consistent.reserve(p);
  for (int i = 0; i < p; ++i)
    res.telemetry.consistent.push_back(
        consistent_set(sys.sensors[i], measurements[i], *sys.state_bound));

  res.telemetry.subsets = enumerate_subsets(p, cfg.max_attacked);
  const std::vector<ConstrainedZonotope> candidates =
      candidate_intersections(res.telemetry.consistent, res.telemetry.subsets);

  MeasurementDiagnostics diag;
  EstimateCollection updated = measurement_update(res.telemetry.predicted, candidates,
                                                  res.telemetry.subsets, cfg, k, &diag);
  res.telemetry.candidate_empty = diag.candidate_empty;
  res.telemetry.products_total = diag.products_total;
  res.telemetry.products_kept = diag.products_kept;

  updated = prune(updated, cfg);
  for (auto& m : updated.members)
    m.set = detail::tighten_representation(std::move(m.set), cfg, sys.state_dim());

  res.detection = detect(res.telemetry.consistent, res.telemetry.predicted, det, k);
  res.bound = error_bound(updated);
  res.collection = std::move(updated);
  return res;
}

}  // namespace zonokit
