#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "zonokit/tolerances.hpp"

namespace zonokit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline double inf_norm(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().rowwise().sum().maxCoeff();
}

inline double inf_norm(const Vector& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

struct SvdResult {
  Matrix left_basis;       // orthonormal columns (thin U)
  Vector singular_values;  // nonincreasing, nonnegative
  Matrix right_basis;      // orthonormal columns (thin V)
  int numeric_rank = 0;
};

inline double rank_cutoff(double sigma_max, Eigen::Index rows, Eigen::Index cols) {
  const double rel = sigma_max * static_cast<double>(std::max(rows, cols)) * tol::kRankRel;
  return std::max(rel, tol::kRankFloor);
}

inline SvdResult svd(const Matrix& m) {
  if (m.rows() < 1 || m.cols() < 1 || !m.allFinite())
    throw std::invalid_argument("svd: matrix must be non-empty and finite");
  Eigen::JacobiSVD<Matrix> dec(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SvdResult out{dec.matrixU(), dec.singularValues(), dec.matrixV(), 0};
  const double cutoff = rank_cutoff(out.singular_values(0), m.rows(), m.cols());
  for (Eigen::Index i = 0; i < out.singular_values.size(); ++i)
    if (out.singular_values(i) > cutoff) ++out.numeric_rank;
  return out;
}

/// Moore-Penrose pseudo-inverse via SVD, valid for any rank.
inline Matrix pseudo_inverse(const Matrix& m) {
  const SvdResult s = svd(m);
  const int r = s.numeric_rank;
  if (r == 0) return Matrix::Zero(m.cols(), m.rows());
  return s.right_basis.leftCols(r) *
         s.singular_values.head(r).cwiseInverse().asDiagonal() *
         s.left_basis.leftCols(r).transpose();
}

/// Orthonormal basis of ker(m) as columns; zero columns when m has full column rank.
inline Matrix null_space_basis(const Matrix& m) {
  if (m.rows() < 1 || m.cols() < 1 || !m.allFinite())
    throw std::invalid_argument("null_space_basis: matrix must be non-empty and finite");
  Eigen::JacobiSVD<Matrix> dec(m, Eigen::ComputeFullV);
  const Vector sv = dec.singularValues();
  const double cutoff = rank_cutoff(sv.size() > 0 ? sv(0) : 0.0, m.rows(), m.cols());
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) ++rank;
  return dec.matrixV().rightCols(m.cols() - rank);
}

/// Guaranteed upper bound on the spectral radius: min over k of ||A^(2^k)||_inf^(1/2^k),
/// evaluated with normalized repeated squaring so powers never under/overflow.
/// rho(A) <= returned value + tol::kSpectralSlack.
inline double spectral_radius_upper(const Matrix& m, int iterations = 40) {
  if (m.rows() != m.cols()) throw std::invalid_argument("spectral_radius_upper: square matrix required");
  if (!m.allFinite()) throw std::invalid_argument("spectral_radius_upper: matrix must be finite");
  double norm = inf_norm(m);
  if (norm == 0.0) return 0.0;
  double best = norm;
  Matrix cur = m / norm;
  double log_norm = std::log(norm);  // log ||A^k||_inf for the current k
  double k = 1.0;
  for (int it = 0; it < iterations; ++it) {
    Matrix sq = cur * cur;
    const double n2 = inf_norm(sq);
    k *= 2.0;
    if (n2 == 0.0) return 0.0;  // nilpotent
    log_norm = 2.0 * log_norm + std::log(n2);
    cur = sq / n2;
    best = std::min(best, std::exp(log_norm / k));
  }
  return best;
}

/// Numeric rank of the stacked observability matrix [C; CA; ...; CA^(n-1)].
inline int observability_rank(const Matrix& a, const Matrix& c) {
  if (a.rows() != a.cols()) throw std::invalid_argument("observability_rank: A must be square");
  if (c.cols() != a.rows()) throw std::invalid_argument("observability_rank: C column count must match A");
  const Eigen::Index n = a.rows();
  const Eigen::Index m = c.rows();
  Matrix stacked(m * n, n);
  Matrix block = c;
  for (Eigen::Index i = 0; i < n; ++i) {
    stacked.middleRows(i * m, m) = block;
    block = block * a;
  }
  return svd(stacked).numeric_rank;
}

}  // namespace zonokit
