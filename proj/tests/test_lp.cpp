#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "zonokit/lp.hpp"

using namespace zonokit;
using Catch::Approx;

TEST_CASE("lp_feasible: sum constraints on the unit box") {
  Matrix a(1, 2);
  a << 1.0, 1.0;

  const LpFeasibility yes = lp_feasible(LpProblem::feasibility(a, Vector::Constant(1, 0.0)));
  REQUIRE(yes.feasible);
  CHECK(std::abs(yes.witness.sum()) < 1e-7);
  CHECK(yes.witness.cwiseAbs().maxCoeff() <= 1.0 + tol::kLpBounds);

  // Max attainable sum over [-1,1]^2 is 2 < 3.
  CHECK_FALSE(lp_feasible(LpProblem::feasibility(a, Vector::Constant(1, 3.0))).feasible);
}

TEST_CASE("lp_feasible: dimension mismatch is an input error") {
  LpProblem p = LpProblem::feasibility(Matrix::Identity(2, 2), Vector::Zero(2));
  p.equality_rhs = Vector::Zero(3);
  CHECK_THROWS_AS(lp_feasible(p), std::invalid_argument);

  LpProblem q = LpProblem::feasibility(Matrix::Identity(2, 2), Vector::Zero(2));
  q.lower(0) = 2.0;  // crosses the upper bound
  CHECK_THROWS_AS(lp_feasible(q), std::invalid_argument);
}

TEST_CASE("lp_feasible matches the complete grid oracle on 200 random instances") {
  Rng rng(4242);
  const double band = 0.02;
  int infeasible_seen = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int vars = rng.uniform_int(1, 4);
    const int rows = rng.uniform_int(1, 2);
    const Matrix a = oracles::random_matrix(rng, rows, vars, 0.9);
    Vector b(rows);
    if (rng.unit() < 0.6) {
      b = a * rng.box(vars);  // reachable rhs
    } else {
      for (int i = 0; i < rows; ++i) b(i) = 3.0 * rng.symmetric();
    }

    const LpFeasibility lp = lp_feasible(LpProblem::feasibility(a, b));
    if (lp.feasible) {
      // The witness satisfies A x = b to 1e-7; its nearest grid point is
      // within 0.005 per coordinate, hence within the 0.02 residual band.
      CHECK(inf_norm(Vector(a * lp.witness - b)) <= tol::kLpFeasibility * std::max(1.0, inf_norm(b)));
      CHECK(lp.witness.cwiseAbs().maxCoeff() <= 1.0 + tol::kLpBounds);
      CHECK(oracles::grid_feasible_within(a, b, band));
    } else {
      ++infeasible_seen;
      // An exact solution would put a grid point within the band, so the
      // oracle must come up empty as well.
      CHECK_FALSE(oracles::grid_feasible_within(a, b, band));
    }
  }
  CHECK(infeasible_seen > 20);  // the corpus exercises both verdicts
}

TEST_CASE("lp_optimize: hand-solved instances") {
  // min b1 + b2  s.t.  b1 - b2 = 0.5  on [-1,1]^2  ->  b = (-0.5, -1), value -1.5.
  Matrix a(1, 2);
  a << 1.0, -1.0;
  Vector c(2);
  c << 1.0, 1.0;
  const LpSolution s = lp_optimize(LpProblem::minimize(c, a, Vector::Constant(1, 0.5)));
  REQUIRE(s.status == LpStatus::optimal);
  CHECK(s.value == Approx(-1.5).margin(1e-9));
  CHECK(s.point(0) == Approx(-0.5).margin(1e-9));
  CHECK(s.point(1) == Approx(-1.0).margin(1e-9));

  // Unconstrained: min c . b over the box is -sum |c_i|.
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const int vars = rng.uniform_int(1, 5);
    Vector obj(vars);
    for (int i = 0; i < vars; ++i) obj(i) = 2.0 * rng.symmetric();
    const LpSolution r =
        lp_optimize(LpProblem::minimize(obj, Matrix::Zero(0, vars), Vector::Zero(0)));
    REQUIRE(r.status == LpStatus::optimal);
    CHECK(r.value == Approx(-obj.cwiseAbs().sum()).margin(1e-9));
  }

  // Infeasible problems are reported as such.
  Matrix one(1, 1);
  one << 1.0;
  CHECK(lp_optimize(LpProblem::minimize(Vector::Zero(1), one, Vector::Constant(1, 2.0))).status ==
        LpStatus::infeasible);
}

TEST_CASE("lp_optimize: support function of a box zonotope is exact") {
  // For an unconstrained zonotope the support value in direction d has the
  // closed form d.c + sum |G^T d|; the LP must reproduce it to 1e-6.
  Rng rng(1234);
  for (int trial = 0; trial < 100; ++trial) {
    const int vars = rng.uniform_int(1, 6);
    Vector g(vars);
    for (int i = 0; i < vars; ++i) g(i) = 2.0 * rng.symmetric();
    const LpSolution s =
        lp_optimize(LpProblem::minimize(-g, Matrix::Zero(0, vars), Vector::Zero(0)));
    REQUIRE(s.status == LpStatus::optimal);
    CHECK(-s.value == Approx(g.cwiseAbs().sum()).margin(1e-6));
    CHECK(std::abs(g.dot(s.point) + s.value) < 1e-9);  // argmin consistent with value
  }
}

TEST_CASE("lp_optimize: unbounded detection") {
  LpProblem p;
  p.objective = Vector::Constant(1, -1.0);
  p.equality_lhs = Matrix::Zero(0, 1);
  p.equality_rhs = Vector::Zero(0);
  p.lower = Vector::Constant(1, 0.0);
  p.upper = Vector::Constant(1, std::numeric_limits<double>::infinity());
  CHECK(lp_optimize(p).status == LpStatus::unbounded);
}

TEST_CASE("lp verdicts are deterministic") {
  Rng rng(5);
  const Matrix a = oracles::random_matrix(rng, 2, 4, 0.8);
  const Vector b = a * rng.box(4);
  const LpSolution first = lp_optimize(LpProblem::minimize(Vector::Ones(4), a, b));
  for (int i = 0; i < 5; ++i) {
    const LpSolution again = lp_optimize(LpProblem::minimize(Vector::Ones(4), a, b));
    REQUIRE(again.status == first.status);
    CHECK(again.value == first.value);
    CHECK((again.point - first.point).cwiseAbs().maxCoeff() == 0.0);
  }
}
