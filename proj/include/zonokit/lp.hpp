#pragma once

// Dense bounded-variable simplex for the small equality-constrained programs
// the set calculus generates:  min c'x  s.t.  Ax = b,  lo <= x <= up.
// Two phases with artificial variables, Bland's rule throughout, so runs are
// deterministic and cycle-free.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "zonokit/linalg.hpp"
#include "zonokit/tolerances.hpp"

namespace zonokit {

struct LpProblem {
  Vector objective;     // size n; all zeros means a pure feasibility query
  Matrix equality_lhs;  // m x n
  Vector equality_rhs;  // m
  Vector lower;         // size n
  Vector upper;         // size n

  /// Feasibility problem over the unit box [-1,1]^n.
  static LpProblem feasibility(const Matrix& a, const Vector& b) {
    LpProblem p;
    p.objective = Vector::Zero(a.cols());
    p.equality_lhs = a;
    p.equality_rhs = b;
    p.lower = Vector::Constant(a.cols(), -1.0);
    p.upper = Vector::Constant(a.cols(), 1.0);
    return p;
  }

  /// min c'x over the unit box subject to Ax = b.
  static LpProblem minimize(const Vector& c, const Matrix& a, const Vector& b) {
    LpProblem p = feasibility(a, b);
    p.objective = c;
    return p;
  }
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  Vector point;  // argmin / feasibility witness (valid when status == optimal)
  double value = 0.0;
};

struct LpFeasibility {
  bool feasible = false;
  Vector witness;  // valid when feasible
};

namespace detail {

class BoundedSimplex {
 public:
  BoundedSimplex(const Matrix& a, const Vector& b, const Vector& lower, const Vector& upper)
      : n_(static_cast<int>(a.cols())),
        m_(static_cast<int>(a.rows())),
        total_(n_ + m_),
        tab_(m_, n_ + m_),
        rhs_(b),
        basis_(m_),
        in_basis_(total_, false),
        at_upper_(total_, false),
        lo_(total_),
        up_(total_),
        costs_(Vector::Zero(total_)) {
    tab_.leftCols(n_) = a;
    tab_.rightCols(m_).setZero();
    lo_.head(n_) = lower;
    up_.head(n_) = upper;
    lo_.tail(m_).setZero();
    up_.tail(m_).setConstant(std::numeric_limits<double>::infinity());
    // Real variables start at a finite bound.
    for (int j = 0; j < n_; ++j) {
      if (std::isfinite(lo_(j))) {
        at_upper_[j] = false;
      } else if (std::isfinite(up_(j))) {
        at_upper_[j] = true;
      } else {
        throw std::invalid_argument("lp: free variables are not supported");
      }
    }
    // Artificial basis with nonnegative starting values: flip rows whose
    // residual at the starting point is negative.
    Vector start(n_);
    for (int j = 0; j < n_; ++j) start(j) = value_at_bound(j);
    const Vector resid = b - a * start;
    for (int i = 0; i < m_; ++i) {
      if (resid(i) < 0.0) {
        tab_.row(i) = -tab_.row(i);
        rhs_(i) = -rhs_(i);
      }
      tab_(i, n_ + i) = 1.0;
      basis_[i] = n_ + i;
      in_basis_[n_ + i] = true;
    }
  }

  /// Phase 1. Returns the residual sum; ~0 means feasible.
  double drive_to_feasibility() {
    costs_.setZero();
    costs_.tail(m_).setOnes();
    run();
    const double infeasibility = current_objective();
    // Pin artificials at zero so phase 2 cannot reuse them.
    up_.tail(m_).setZero();
    return infeasibility;
  }

  /// Phase 2 from a feasible basis.
  LpStatus minimize(const Vector& objective) {
    costs_.setZero();
    costs_.head(n_) = objective;
    return run();
  }

  /// Current values of the real variables, clamped into their boxes.
  Vector solution() const {
    const Vector xb = basic_values();
    Vector x(n_);
    for (int j = 0; j < n_; ++j) x(j) = in_basis_[j] ? 0.0 : value_at_bound(j);
    for (int i = 0; i < m_; ++i)
      if (basis_[i] < n_) x(basis_[i]) = xb(i);
    for (int j = 0; j < n_; ++j) {
      if (std::isfinite(lo_(j))) x(j) = std::max(x(j), lo_(j));
      if (std::isfinite(up_(j))) x(j) = std::min(x(j), up_(j));
    }
    return x;
  }

 private:
  double value_at_bound(int j) const { return at_upper_[j] ? up_(j) : lo_(j); }

  Vector basic_values() const {
    Vector xb = rhs_;
    for (int j = 0; j < total_; ++j) {
      if (in_basis_[j]) continue;
      const double v = value_at_bound(j);
      if (v != 0.0) xb -= tab_.col(j) * v;
    }
    return xb;
  }

  double current_objective() const {
    const Vector xb = basic_values();
    double obj = 0.0;
    for (int i = 0; i < m_; ++i) obj += costs_(basis_[i]) * xb(i);
    for (int j = 0; j < total_; ++j)
      if (!in_basis_[j]) obj += costs_(j) * value_at_bound(j);
    return obj;
  }

  void pivot(int row, int col) {
    const double p = tab_(row, col);
    tab_.row(row) /= p;
    rhs_(row) /= p;
    for (int i = 0; i < m_; ++i) {
      if (i == row) continue;
      const double f = tab_(i, col);
      if (std::abs(f) > 0.0) {
        tab_.row(i) -= f * tab_.row(row);
        rhs_(i) -= f * rhs_(row);
      }
    }
    in_basis_[basis_[row]] = false;
    in_basis_[col] = true;
    basis_[row] = col;
  }

  LpStatus run() {
    const long max_iters = 1000L + 50L * (m_ + total_);
    for (long iter = 0; iter < max_iters; ++iter) {
      const Vector xb = basic_values();
      Vector dual(m_);
      for (int i = 0; i < m_; ++i) dual(i) = costs_(basis_[i]);

      // Entering variable: Bland's rule (smallest eligible index).
      int enter = -1;
      int dir = 0;
      for (int j = 0; j < total_; ++j) {
        if (in_basis_[j] || lo_(j) == up_(j)) continue;
        const double rc = costs_(j) - dual.dot(tab_.col(j));
        if (!at_upper_[j] && rc < -tol::kReducedCost) {
          enter = j;
          dir = +1;
          break;
        }
        if (at_upper_[j] && rc > tol::kReducedCost) {
          enter = j;
          dir = -1;
          break;
        }
      }
      if (enter < 0) return LpStatus::optimal;

      // Ratio test over basics; ties broken by smallest basic variable index.
      double best = std::numeric_limits<double>::infinity();
      int leave_row = -1;
      bool leave_hits_upper = false;
      for (int i = 0; i < m_; ++i) {
        const double w = dir * tab_(i, enter);
        double cand;
        bool hits_upper;
        if (w > tol::kPivot) {
          if (!std::isfinite(lo_(basis_[i]))) continue;
          cand = (xb(i) - lo_(basis_[i])) / w;
          hits_upper = false;
        } else if (w < -tol::kPivot) {
          if (!std::isfinite(up_(basis_[i]))) continue;
          cand = (up_(basis_[i]) - xb(i)) / (-w);
          hits_upper = true;
        } else {
          continue;
        }
        if (cand < 0.0) cand = 0.0;  // numerical drift on degenerate bases
        if (cand < best - 1e-12 ||
            (cand < best + 1e-12 && leave_row >= 0 && basis_[i] < basis_[leave_row])) {
          best = cand;
          leave_row = i;
          leave_hits_upper = hits_upper;
        }
      }

      const double flip = up_(enter) - lo_(enter);  // may be +inf
      if (leave_row < 0 && !std::isfinite(flip)) return LpStatus::unbounded;
      if (leave_row < 0 || flip <= best) {
        at_upper_[enter] = !at_upper_[enter];  // move across the box, no basis change
        continue;
      }
      const int leaving_var = basis_[leave_row];
      pivot(leave_row, enter);
      at_upper_[leaving_var] = leave_hits_upper;
    }
    throw std::runtime_error("lp: simplex iteration limit exceeded");
  }

  int n_, m_, total_;
  Matrix tab_;
  Vector rhs_;
  std::vector<int> basis_;
  std::vector<char> in_basis_;
  std::vector<char> at_upper_;
  Vector lo_, up_;
  Vector costs_;
};

inline void validate(const LpProblem& p) {
  const auto n = p.equality_lhs.cols();
  const auto m = p.equality_lhs.rows();
  if (p.equality_rhs.size() != m || p.objective.size() != n ||
      p.lower.size() != n || p.upper.size() != n)
    throw std::invalid_argument("lp: inconsistent problem dimensions");
  if (!p.equality_lhs.allFinite() || !p.equality_rhs.allFinite() || !p.objective.allFinite())
    throw std::invalid_argument("lp: problem data must be finite");
  for (Eigen::Index j = 0; j < n; ++j)
    if (!(p.lower(j) <= p.upper(j)))
      throw std::invalid_argument("lp: lower bound exceeds upper bound");
}

}  // namespace detail

inline LpSolution lp_optimize(const LpProblem& p) {
  detail::validate(p);
  detail::BoundedSimplex simplex(p.equality_lhs, p.equality_rhs, p.lower, p.upper);
  const double scale = std::max(1.0, inf_norm(p.equality_rhs));
  if (simplex.drive_to_feasibility() > tol::kLpFeasibility * scale)
    return {LpStatus::infeasible, Vector(), 0.0};
  const LpStatus status = simplex.minimize(p.objective);
  if (status == LpStatus::unbounded) return {LpStatus::unbounded, Vector(), 0.0};
  LpSolution out;
  out.status = LpStatus::optimal;
  out.point = simplex.solution();
  out.value = p.objective.dot(out.point);
  return out;
}

inline LpFeasibility lp_feasible(const LpProblem& p) {
  detail::validate(p);
  detail::BoundedSimplex simplex(p.equality_lhs, p.equality_rhs, p.lower, p.upper);
  const double scale = std::max(1.0, inf_norm(p.equality_rhs));
  if (simplex.drive_to_feasibility() > tol::kLpFeasibility * scale) return {false, Vector()};
  LpFeasibility out{true, simplex.solution()};
  const double resid = inf_norm(Vector(p.equality_lhs * out.witness - p.equality_rhs));
  if (resid > tol::kLpFeasibility * scale)
    throw std::runtime_error("lp: witness lost feasibility");
  return out;
}

}  // namespace zonokit
