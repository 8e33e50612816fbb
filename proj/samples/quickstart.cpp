// Minimal library walkthrough: build the rotating-target system directly,
// run the filter for a few steps under a rotating attack, and print the
// per-step member count and error bound.

#include <iostream>

#include "zonokit/zonokit.hpp"

using namespace zonokit;

int main() {
  Matrix a(2, 2), b(2, 1);
  a << 0.9455, -0.2426, 0.2486, 0.9455;
  b << 0.1, 0.0;

  Matrix c1(1, 2), c2(1, 2), c3(2, 2);
  c1 << 1.0, 0.4;
  c2 << 0.9, -1.2;
  c3 << -0.8, 0.2, 0.0, 0.7;
  const Zonotope unit1(Vector::Zero(1), Matrix::Identity(1, 1));
  const Zonotope unit2(Vector::Zero(2), Matrix::Identity(2, 2));

  std::vector<SensorModel> sensors;
  sensors.emplace_back(1, c1, unit1);
  sensors.emplace_back(2, c2, unit1);
  sensors.emplace_back(3, c3, unit2);

  const Zonotope w(Vector::Zero(2), 0.02 * Matrix::Identity(2, 2));
  SystemModel sys(a, b, std::move(sensors), w, unit2);
  sys.state_bound = estimate_state_bound(sys, /*u_bound=*/10.0);

  const int q = 1;
  std::cout << validate_assumptions(sys, q).summary() << "\n\n";

  EstimatorConfig cfg;
  cfg.max_attacked = q;
  cfg.policy = PrunePolicy::merge_intersecting;
  cfg.reduction_order = 4.0;

  AttackPolicy attack;
  attack.kind = AttackKind::rotating;

  Rng rng(7);
  PlantState plant{0, sample_point(sys.initial_set, rng)};
  EstimateCollection coll = init(sys, cfg);
  DetectionState det;

  for (int k = 1; k <= 10; ++k) {
    const Vector u = Vector::Constant(1, rng.uniform(-10.0, 10.0));
    plant = plant_step(sys, plant, u, sample_point(sys.process_noise, rng));
    const AttackSample atk = evaluate(attack, k, rng, sys.sensors, q, *sys.state_bound);
    std::vector<Vector> ys;
    for (int i = 0; i < sys.sensor_count(); ++i)
      ys.push_back(measure(sys.sensors[i], plant.x, sample_point(sys.sensors[i].noise, rng),
                           atk.injected[i]));
    StepResult res = step(coll, det, sys, cfg, u, ys);
    coll = res.collection;
    det = res.detection;
    bool included = false;
    for (const auto& m : coll.members) included = included || contains_point(m.set, plant.x);
    std::cout << "k=" << k << " members=" << coll.members.size()
              << " radius=" << res.bound.radius << " included=" << included << "\n";
  }
  return 0;
}
