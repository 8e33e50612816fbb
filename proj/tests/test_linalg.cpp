#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "zonokit/linalg.hpp"

using namespace zonokit;
using Catch::Approx;

namespace {

Matrix rotating_a() {
  Matrix a(2, 2);
  a << 0.9455, -0.2426, 0.2486, 0.9455;
  return a;
}

Matrix sensor1() {
  Matrix c(1, 2);
  c << 1.0, 0.4;
  return c;
}

}  // namespace

TEST_CASE("svd: identity, single-row, zero matrix") {
  const SvdResult id = svd(Matrix::Identity(2, 2));
  REQUIRE(id.numeric_rank == 2);
  CHECK(id.singular_values(0) == Approx(1.0));
  CHECK(id.singular_values(1) == Approx(1.0));

  // Oracle: ||C1||_2 from the eigen decomposition of C1^T C1 done by hand:
  // C1^T C1 = [[1, .4], [.4, .16]] has eigenvalues {1.16, 0}.
  const SvdResult s1 = svd(sensor1());
  REQUIRE(s1.numeric_rank == 1);
  CHECK(s1.singular_values(0) == Approx(std::sqrt(1.16)).epsilon(1e-12));

  const SvdResult zero = svd(Matrix::Zero(2, 3));
  CHECK(zero.numeric_rank == 0);
  CHECK(zero.singular_values.maxCoeff() == 0.0);
}

TEST_CASE("svd: rejects non-finite input") {
  Matrix bad(1, 1);
  bad << std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(svd(bad), std::invalid_argument);
}

TEST_CASE("pseudo_inverse: closed-form cases") {
  CHECK((pseudo_inverse(Matrix::Identity(3, 3)) - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() <
        1e-12);

  // Full-row-rank oracle: C^T (C C^T)^-1; here C C^T = 1.16.
  const Matrix p1 = pseudo_inverse(sensor1());
  REQUIRE(p1.rows() == 2);
  REQUIRE(p1.cols() == 1);
  CHECK(p1(0, 0) == Approx(1.0 / 1.16).epsilon(1e-12));
  CHECK(p1(1, 0) == Approx(0.4 / 1.16).epsilon(1e-12));

  // Invertible sensor 3: pseudo-inverse equals the closed-form 2x2 inverse.
  Matrix c3(2, 2);
  c3 << -0.8, 0.2, 0.0, 0.7;
  const double det = -0.8 * 0.7 - 0.2 * 0.0;
  Matrix inv(2, 2);
  inv << 0.7 / det, -0.2 / det, 0.0, -0.8 / det;
  CHECK((pseudo_inverse(c3) - inv).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("null_space_basis: kernel of the experiment sensors") {
  const Matrix v2 = null_space_basis(sensor1());
  REQUIRE(v2.cols() == 1);
  CHECK(v2.col(0).norm() == Approx(1.0).epsilon(1e-12));
  CHECK((sensor1() * v2).cwiseAbs().maxCoeff() < 1e-9);  // sign-free check

  CHECK(null_space_basis(Matrix::Identity(2, 2)).cols() == 0);

  const Matrix whole = null_space_basis(Matrix::Zero(1, 2));
  REQUIRE(whole.cols() == 2);
  CHECK((whole.transpose() * whole - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("moore-penrose identities and svd reconstruction over a random corpus") {
  Rng rng(20240811);
  for (int trial = 0; trial < 500; ++trial) {
    const int rows = rng.uniform_int(1, 4);
    const int cols = rng.uniform_int(1, 4);
    Matrix m;
    if (trial % 3 == 0 && std::min(rows, cols) > 1) {
      const int rank = rng.uniform_int(1, std::min(rows, cols) - 1);
      m = oracles::random_low_rank(rng, rows, cols, rank, 2.0);
    } else {
      m = oracles::random_matrix(rng, rows, cols, 2.0);
    }

    const SvdResult s = svd(m);
    const Matrix rebuilt =
        s.left_basis * s.singular_values.asDiagonal() * s.right_basis.transpose();
    CHECK(inf_norm(Matrix(rebuilt - m)) <= tol::kSvdReconstruct * std::max(1.0, inf_norm(m)));

    const Matrix p = pseudo_inverse(m);
    CHECK(inf_norm(Matrix(m * p * m - m)) < tol::kPseudoInverse);
    CHECK(inf_norm(Matrix(p * m * p - p)) < tol::kPseudoInverse);
    CHECK(inf_norm(Matrix(m * p - (m * p).transpose())) < tol::kPseudoInverse);
    CHECK(inf_norm(Matrix(p * m - (p * m).transpose())) < tol::kPseudoInverse);

    const Matrix kernel = null_space_basis(m);
    if (kernel.cols() > 0) {
      CHECK(inf_norm(Matrix(m * kernel)) < tol::kNullSpace * std::max(1.0, inf_norm(m)));
      CHECK(inf_norm(Matrix(kernel.transpose() * kernel -
                            Matrix::Identity(kernel.cols(), kernel.cols()))) < tol::kNullSpace);
    }
    CHECK(kernel.cols() == m.cols() - s.numeric_rank);
  }
}

TEST_CASE("spectral_radius_upper: diagonal, experiment matrix, identity") {
  Matrix diag = Matrix::Zero(2, 2);
  diag(0, 0) = 0.5;
  diag(1, 1) = -0.2;
  CHECK(spectral_radius_upper(diag) == Approx(0.5).margin(1e-6));

  // Oracle: complex pair of the 2x2, |lambda| = sqrt(0.9455^2 + 0.2426*0.2486).
  const double exact = std::sqrt(0.9455 * 0.9455 + 0.2426 * 0.2486);
  const double bound = spectral_radius_upper(rotating_a());
  CHECK(exact <= bound + tol::kSpectralSlack);  // guaranteed upper bound
  CHECK(bound == Approx(exact).margin(1e-4));
  CHECK(bound == Approx(0.9768).margin(5e-4));

  const double id_bound = spectral_radius_upper(Matrix::Identity(3, 3));
  CHECK(id_bound == Approx(1.0).margin(1e-9));
  CHECK_FALSE(id_bound < 1.0 - tol::kSchurMargin);  // flagged not Schur
}

TEST_CASE("spectral_radius_upper: always an upper bound on random 2x2 matrices") {
  Rng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const Matrix m = oracles::random_matrix(rng, 2, 2, 1.5);
    // Exact 2x2 spectral radius from the characteristic polynomial.
    const double tr = m.trace(), det = m.determinant();
    const double disc = tr * tr - 4.0 * det;
    const double exact = disc >= 0.0
                             ? std::max(std::abs((tr + std::sqrt(disc)) / 2.0),
                                        std::abs((tr - std::sqrt(disc)) / 2.0))
                             : std::sqrt(det);
    CHECK(exact <= spectral_radius_upper(m) + tol::kSpectralSlack);
  }
}

TEST_CASE("observability_rank: experiment pair, deficient pair, full output") {
  // Oracle: det [C1; C1 A] = -0.282376 != 0.
  CHECK(observability_rank(rotating_a(), sensor1()) == 2);

  Matrix c10(1, 2);
  c10 << 1.0, 0.0;
  CHECK(observability_rank(Matrix::Identity(2, 2), c10) == 1);

  CHECK(observability_rank(rotating_a(), Matrix::Identity(2, 2)) == 2);
}
