#pragma once

// Discrete-time LTI plant
//   x(k+1) = A x(k) + B u(k) + w(k),      w in W
//   y_i(k) = C_i x(k) + v_i(k) + a_i(k),  v_i in V_i, attack a_i unrestricted
// plus the standing-assumption checks the filter relies on: per-sensor
// observability, Schur stability, attack budget q < p, and the infinity-norm
// state bound M.

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "zonokit/errors.hpp"
#include "zonokit/linalg.hpp"
#include "zonokit/setops.hpp"
#include "zonokit/tolerances.hpp"

namespace zonokit {

struct SensorModel {
  int id;                // 1-based sensor index
  Matrix output_matrix;  // m_i x n_x
  Zonotope noise;        // dimension m_i

  // Derived once at construction; the filter uses these every step.
  Matrix pinv;    // Moore-Penrose pseudo-inverse of the output matrix
  Matrix kernel;  // orthonormal basis of ker(output_matrix)
  int rank;

  SensorModel(int sensor_id, Matrix c, Zonotope v)
      : id(sensor_id),
        output_matrix(std::move(c)),
        noise(std::move(v)),
        pinv(pseudo_inverse(output_matrix)),
        kernel(null_space_basis(output_matrix)),
        rank(svd(output_matrix).numeric_rank) {
    if (noise.dim() != output_matrix.rows())
      throw std::invalid_argument("SensorModel: noise dimension must match output rows");
  }

  int output_dim() const { return static_cast<int>(output_matrix.rows()); }
};

struct SystemModel {
  Matrix a;  // n_x x n_x
  Matrix b;  // n_x x n_u
  std::vector<SensorModel> sensors;
  Zonotope process_noise;  // W, dimension n_x
  Zonotope initial_set;    // X_0, dimension n_x
  std::optional<double> state_bound;  // M: sup_k ||x(k)||_inf

  SystemModel(Matrix a_in, Matrix b_in, std::vector<SensorModel> sensors_in,
              Zonotope w, Zonotope x0, std::optional<double> m = std::nullopt)
      : a(std::move(a_in)),
        b(std::move(b_in)),
        sensors(std::move(sensors_in)),
        process_noise(std::move(w)),
        initial_set(std::move(x0)),
        state_bound(m) {
    const auto n = a.rows();
    if (a.cols() != n) throw std::invalid_argument("SystemModel: A must be square");
    if (b.rows() != n) throw std::invalid_argument("SystemModel: B row count must match A");
    if (process_noise.dim() != n || initial_set.dim() != n)
      throw std::invalid_argument("SystemModel: noise/initial set dimension must match A");
    for (const auto& s : sensors)
      if (s.output_matrix.cols() != n)
        throw std::invalid_argument("SystemModel: sensor output matrix columns must match A");
  }

  int state_dim() const { return static_cast<int>(a.rows()); }
  int input_dim() const { return static_cast<int>(b.cols()); }
  int sensor_count() const { return static_cast<int>(sensors.size()); }
};

struct PlantState {
  int k = 0;
  Vector x;
};

struct AssumptionReport {
  struct SensorCheck {
    int id;
    int rank;
    bool observable;
  };
  std::vector<SensorCheck> sensor_checks;
  double spectral_radius_bound = 0.0;
  bool schur_ok = false;
  int q = 0;
  int p = 0;
  bool q_ok = false;
  bool state_bound_ok = false;
  std::optional<double> state_bound;

  bool all_ok() const {
    if (!schur_ok || !q_ok || !state_bound_ok) return false;
    for (const auto& c : sensor_checks)
      if (!c.observable) return false;
    return true;
  }

  std::string summary() const {
    std::ostringstream out;
    int observable = 0;
    for (const auto& c : sensor_checks) observable += c.observable;
    out << "sensors observable: " << observable << "/" << sensor_checks.size();
    for (const auto& c : sensor_checks)
      if (!c.observable) out << " [sensor " << c.id << " rank " << c.rank << "]";
    out << "\nSchur stable: " << (schur_ok ? "yes" : "NO")
        << " (spectral radius upper bound " << spectral_radius_bound << ")";
    out << "\nattack budget: q = " << q << " < p = " << p << ": " << (q_ok ? "yes" : "NO");
    out << "\nstate bound: ";
    if (state_bound)
      out << "M = " << *state_bound << (state_bound_ok ? " (consistent with X_0)" : " (INCONSISTENT)");
    else
      out << "not pinned (estimated at run time)";
    return out.str();
  }
};

/// Checks every standing assumption; nothing is silently ignored.
inline AssumptionReport validate_assumptions(const SystemModel& sys, int q) {
  AssumptionReport rep;
  const int n = sys.state_dim();
  for (const auto& s : sys.sensors) {
    const int r = observability_rank(sys.a, s.output_matrix);
    rep.sensor_checks.push_back({s.id, r, r == n});
  }
  rep.spectral_radius_bound = spectral_radius_upper(sys.a);
  rep.schur_ok = rep.spectral_radius_bound < 1.0 - tol::kSchurMargin;
  rep.q = q;
  rep.p = sys.sensor_count();
  rep.q_ok = q >= 0 && q < rep.p;
  rep.state_bound = sys.state_bound;
  if (sys.state_bound) {
    // Necessary condition: the initial set must already satisfy the bound.
    const IntervalBox h = interval_hull(sys.initial_set);
    const double x0_extent = std::max(inf_norm(h.lower), inf_norm(h.upper));
    rep.state_bound_ok = *sys.state_bound > 0.0 && x0_extent <= *sys.state_bound;
  } else {
    rep.state_bound_ok = true;
  }
  return rep;
}

/// Guaranteed upper bound on sup_k ||x(k)||_inf for inputs with
/// ||u||_inf <= u_bound:  ||A^k|| shrinks below 1 at some power kappa, and the
/// partial norm sums telescope into a geometric tail. Every kappa <= horizon
/// with ||A^kappa||_inf < 1 yields a valid bound; the smallest one is returned.
inline double estimate_state_bound(const SystemModel& sys, double u_bound, int horizon = 256) {
  if (horizon < 1) throw std::invalid_argument("estimate_state_bound: horizon must be >= 1");
  const IntervalBox x0 = interval_hull(sys.initial_set);
  const double x0_extent = std::max(inf_norm(x0.lower), inf_norm(x0.upper));
  const IntervalBox wh = interval_hull(sys.process_noise);
  const double drive = inf_norm(sys.b) * u_bound + std::max(inf_norm(wh.lower), inf_norm(wh.upper));

  double best = std::numeric_limits<double>::infinity();
  Matrix power = Matrix::Identity(sys.state_dim(), sys.state_dim());
  double partial_sum = 0.0;   // sum_{j<kappa} ||A^j||
  double max_power = 0.0;     // max_{j<kappa} ||A^j||
  for (int kappa = 1; kappa <= horizon; ++kappa) {
    partial_sum += inf_norm(power);
    max_power = std::max(max_power, inf_norm(power));
    power = power * sys.a;
    const double gamma = inf_norm(power);
    if (gamma < 1.0) {
      const double bound = max_power * x0_extent + partial_sum / (1.0 - gamma) * drive;
      best = std::min(best, bound);
    }
  }
  if (!std::isfinite(best))
    throw std::runtime_error(
        "estimate_state_bound: no power of A with ||A^k||_inf < 1 within the horizon; "
        "increase the horizon or check Schur stability");
  return best;
}

/// Exact affine update x(k+1) = A x(k) + B u(k) + w.
inline PlantState plant_step(const SystemModel& sys, const PlantState& state,
                             const Vector& u, const Vector& w) {
  if (u.size() != sys.input_dim()) throw std::invalid_argument("plant_step: input dimension mismatch");
  if (!contains_point(ConstrainedZonotope(sys.process_noise), w))
    throw std::invalid_argument("plant_step: process noise sample outside W");
  PlantState next{state.k + 1, sys.a * state.x + sys.b * u + w};
  if (sys.state_bound &&
      inf_norm(next.x) > *sys.state_bound * (1.0 + tol::kStateBoundSlack))
    throw invariant_violation("plant_step: state left the ||x||_inf <= M box");
  return next;
}

/// y = C x + v + attack. The attack term is added last and never clamped.
inline Vector measure(const SensorModel& sensor, const Vector& x, const Vector& v,
                      const Vector& attack) {
  if (x.size() != sensor.output_matrix.cols())
    throw std::invalid_argument("measure: state dimension mismatch");
  if (v.size() != sensor.output_dim() || attack.size() != sensor.output_dim())
    throw std::invalid_argument("measure: noise/attack dimension mismatch");
  if (!contains_point(ConstrainedZonotope(sensor.noise), v))
    throw std::invalid_argument("measure: noise sample outside V_i");
  return sensor.output_matrix * x + v + attack;
}

}  // namespace zonokit
