#pragma once

// Zonotope and constrained-zonotope calculus. A zonotope <c, G> is the set
// {c + G b : b in [-1,1]^xi}; a constrained zonotope additionally requires
// A b = r on the coefficients. Zonotopes are closed under linear maps and
// Minkowski sums, constrained zonotopes also under intersection, which is
// everything the filter needs.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "zonokit/linalg.hpp"
#include "zonokit/lp.hpp"
#include "zonokit/rng.hpp"

namespace zonokit {

struct Zonotope {
  Vector center;
  Matrix generators;  // dim x xi, xi >= 0 (a point has no generators)

  Zonotope(Vector c, Matrix g) : center(std::move(c)), generators(std::move(g)) {
    if (generators.size() == 0 && generators.rows() != center.size())
      generators.resize(center.size(), 0);
    if (generators.rows() != center.size())
      throw std::invalid_argument("Zonotope: generator rows must match center dimension");
    if (!center.allFinite() || !generators.allFinite())
      throw std::invalid_argument("Zonotope: entries must be finite");
  }

  static Zonotope point(Vector c) {
    const auto n = c.size();
    return Zonotope(std::move(c), Matrix::Zero(n, 0));
  }

  int dim() const { return static_cast<int>(center.size()); }
  int generator_count() const { return static_cast<int>(generators.cols()); }
};

struct ConstrainedZonotope {
  Vector center;
  Matrix generators;      // dim x xi
  Matrix constraint_lhs;  // rows x xi (zero rows = plain zonotope)
  Vector constraint_rhs;  // rows

  ConstrainedZonotope(Vector c, Matrix g, Matrix a, Vector b)
      : center(std::move(c)),
        generators(std::move(g)),
        constraint_lhs(std::move(a)),
        constraint_rhs(std::move(b)) {
    if (generators.size() == 0 && generators.rows() != center.size())
      generators.resize(center.size(), 0);
    if (constraint_lhs.size() == 0 && constraint_rhs.size() == 0)
      constraint_lhs.resize(0, generators.cols());
    if (generators.rows() != center.size())
      throw std::invalid_argument("ConstrainedZonotope: generator rows must match center dimension");
    if (constraint_lhs.rows() != constraint_rhs.size() || constraint_lhs.cols() != generators.cols())
      throw std::invalid_argument("ConstrainedZonotope: constraint dimensions inconsistent");
    if (!center.allFinite() || !generators.allFinite() ||
        !constraint_lhs.allFinite() || !constraint_rhs.allFinite())
      throw std::invalid_argument("ConstrainedZonotope: entries must be finite");
  }

  explicit ConstrainedZonotope(const Zonotope& z)
      : ConstrainedZonotope(z.center, z.generators,
                            Matrix::Zero(0, z.generators.cols()), Vector::Zero(0)) {}

  int dim() const { return static_cast<int>(center.size()); }
  int generator_count() const { return static_cast<int>(generators.cols()); }
  int constraint_count() const { return static_cast<int>(constraint_rhs.size()); }

  Zonotope relaxed() const { return Zonotope(center, generators); }  // constraints dropped: a superset
};

struct IntervalBox {
  Vector lower;
  Vector upper;

  IntervalBox(Vector lo, Vector up) : lower(std::move(lo)), upper(std::move(up)) {
    if (lower.size() != upper.size())
      throw std::invalid_argument("IntervalBox: dimension mismatch");
    for (Eigen::Index i = 0; i < lower.size(); ++i)
      if (!(lower(i) <= upper(i)))
        throw std::invalid_argument("IntervalBox: lower bound exceeds upper bound");
  }

  int dim() const { return static_cast<int>(lower.size()); }
  Vector midpoint() const { return 0.5 * (lower + upper); }
  Vector half_widths() const { return 0.5 * (upper - lower); }

  static IntervalBox join(const IntervalBox& a, const IntervalBox& b) {
    return IntervalBox(a.lower.cwiseMin(b.lower), a.upper.cwiseMax(b.upper));
  }

  Zonotope box_zonotope() const {
    return Zonotope(midpoint(), Matrix(half_widths().asDiagonal()));
  }
};

// ---------------------------------------------------------------------------
// linear maps and Minkowski sums

inline Zonotope linear_map(const Matrix& l, const Zonotope& z) {
  if (l.cols() != z.dim()) throw std::invalid_argument("linear_map: dimension mismatch");
  return Zonotope(l * z.center, l * z.generators);
}

inline ConstrainedZonotope linear_map(const Matrix& l, const ConstrainedZonotope& z) {
  if (l.cols() != z.dim()) throw std::invalid_argument("linear_map: dimension mismatch");
  return ConstrainedZonotope(l * z.center, l * z.generators, z.constraint_lhs, z.constraint_rhs);
}

inline Zonotope minkowski_sum(const Zonotope& a, const Zonotope& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("minkowski_sum: dimension mismatch");
  Matrix gens(a.dim(), a.generator_count() + b.generator_count());
  gens << a.generators, b.generators;
  return Zonotope(a.center + b.center, std::move(gens));
}

inline ConstrainedZonotope minkowski_sum(const ConstrainedZonotope& a, const ConstrainedZonotope& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("minkowski_sum: dimension mismatch");
  const int xa = a.generator_count(), xb = b.generator_count();
  const int ra = a.constraint_count(), rb = b.constraint_count();
  Matrix gens(a.dim(), xa + xb);
  gens << a.generators, b.generators;
  Matrix lhs = Matrix::Zero(ra + rb, xa + xb);
  lhs.topLeftCorner(ra, xa) = a.constraint_lhs;
  lhs.bottomRightCorner(rb, xb) = b.constraint_lhs;
  Vector rhs(ra + rb);
  rhs << a.constraint_rhs, b.constraint_rhs;
  return ConstrainedZonotope(a.center + b.center, std::move(gens), std::move(lhs), std::move(rhs));
}

inline ConstrainedZonotope translate(const ConstrainedZonotope& z, const Vector& v) {
  return ConstrainedZonotope(z.center + v, z.generators, z.constraint_lhs, z.constraint_rhs);
}

// ---------------------------------------------------------------------------
// intersection and membership

/// Exact intersection: generators [G1 0], constraints stack A1, A2 and the
/// coupling G1 b1 - G2 b2 = c2 - c1.
inline ConstrainedZonotope intersect(const ConstrainedZonotope& a, const ConstrainedZonotope& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("intersect: dimension mismatch");
  const int n = a.dim();
  const int xa = a.generator_count(), xb = b.generator_count();
  const int ra = a.constraint_count(), rb = b.constraint_count();
  Matrix gens = Matrix::Zero(n, xa + xb);
  gens.leftCols(xa) = a.generators;
  Matrix lhs = Matrix::Zero(ra + rb + n, xa + xb);
  lhs.topLeftCorner(ra, xa) = a.constraint_lhs;
  lhs.block(ra, xa, rb, xb) = b.constraint_lhs;
  lhs.bottomLeftCorner(n, xa) = a.generators;
  lhs.bottomRightCorner(n, xb) = -b.generators;
  Vector rhs(ra + rb + n);
  rhs << a.constraint_rhs, b.constraint_rhs, b.center - a.center;
  return ConstrainedZonotope(a.center, std::move(gens), std::move(lhs), std::move(rhs));
}

inline ConstrainedZonotope intersect(const Zonotope& a, const Zonotope& b) {
  return intersect(ConstrainedZonotope(a), ConstrainedZonotope(b));
}

/// True iff no coefficient vector in the box satisfies the constraints.
inline bool is_empty(const ConstrainedZonotope& z) {
  if (z.constraint_count() == 0) return false;
  return !lp_feasible(LpProblem::feasibility(z.constraint_lhs, z.constraint_rhs)).feasible;
}

inline bool contains_point(const ConstrainedZonotope& z, const Vector& x) {
  if (x.size() != z.dim()) throw std::invalid_argument("contains_point: dimension mismatch");
  const int n = z.dim(), rows = z.constraint_count();
  Matrix lhs(rows + n, z.generator_count());
  lhs << z.constraint_lhs, z.generators;
  Vector rhs(rows + n);
  rhs << z.constraint_rhs, x - z.center;
  return lp_feasible(LpProblem::feasibility(lhs, rhs)).feasible;
}

inline bool contains_point(const Zonotope& z, const Vector& x) {
  return contains_point(ConstrainedZonotope(z), x);
}

// ---------------------------------------------------------------------------
// hulls, radius, support

inline IntervalBox interval_hull(const Zonotope& z) {
  const Vector spread = z.generators.cwiseAbs().rowwise().sum();
  return IntervalBox(z.center - spread, z.center + spread);
}

/// Tight per-dimension bounds; 2*dim support LPs for constrained sets.
/// Throws std::domain_error on an empty set.
inline IntervalBox interval_hull(const ConstrainedZonotope& z) {
  if (z.constraint_count() == 0) return interval_hull(z.relaxed());
  const int n = z.dim();
  Vector lo(n), up(n);
  for (int d = 0; d < n; ++d) {
    const Vector row = z.generators.row(d).transpose();
    const LpSolution down =
        lp_optimize(LpProblem::minimize(row, z.constraint_lhs, z.constraint_rhs));
    if (down.status != LpStatus::optimal)
      throw std::domain_error("interval_hull: empty constrained zonotope");
    const LpSolution top =
        lp_optimize(LpProblem::minimize(-row, z.constraint_lhs, z.constraint_rhs));
    lo(d) = z.center(d) + down.value;
    up(d) = z.center(d) - top.value;
    if (lo(d) > up(d)) std::swap(lo(d), up(d));  // guard LP tolerance jitter
  }
  return IntervalBox(std::move(lo), std::move(up));
}

/// Upper bound on the radius of the smallest ball centered at the set's own
/// center that contains the set (exact for axis-aligned boxes). The exact
/// value is an NP-hard norm maximization; the bound is the Euclidean norm of
/// the per-dimension worst-case deviations taken from the interval hull.
inline double radius(const IntervalBox& hull, const Vector& center) {
  const Vector dev = (hull.upper - center).cwiseMax(center - hull.lower).cwiseMax(0.0);
  return dev.norm();
}

inline double radius(const Zonotope& z) { return radius(interval_hull(z), z.center); }

inline double radius(const ConstrainedZonotope& z) { return radius(interval_hull(z), z.center); }

/// max over the set of direction . x
inline double support_value(const ConstrainedZonotope& z, const Vector& direction) {
  const Vector obj = -(z.generators.transpose() * direction);
  const LpSolution s = lp_optimize(LpProblem::minimize(obj, z.constraint_lhs, z.constraint_rhs));
  if (s.status != LpStatus::optimal) throw std::domain_error("support_value: empty set");
  return direction.dot(z.center) - s.value;
}

/// Outer convex polygon of a 2-D projection from `directions` support LPs,
/// ordered counter-clockwise. Always a superset of the projected set.
inline std::vector<Eigen::Vector2d> support_polygon_2d(const ConstrainedZonotope& z,
                                                       const Matrix& projection,
                                                       int directions) {
  if (projection.rows() != 2 || projection.cols() != z.dim())
    throw std::invalid_argument("support_polygon_2d: projection must be 2 x dim");
  if (directions < 3) throw std::invalid_argument("support_polygon_2d: need at least 3 directions");
  const ConstrainedZonotope flat = linear_map(projection, z);
  std::vector<double> angle(directions), offset(directions);
  for (int t = 0; t < directions; ++t) {
    angle[t] = 2.0 * std::numbers::pi * t / directions;
    Vector d(2);
    d << std::cos(angle[t]), std::sin(angle[t]);
    offset[t] = support_value(flat, d);
  }
  // Vertices are the intersections of consecutive tangent lines.
  std::vector<Eigen::Vector2d> poly(directions);
  for (int t = 0; t < directions; ++t) {
    const int u = (t + 1) % directions;
    const double c0 = std::cos(angle[t]), s0 = std::sin(angle[t]);
    const double c1 = std::cos(angle[u]), s1 = std::sin(angle[u]);
    const double det = c0 * s1 - s0 * c1;  // sin of the angle gap, nonzero for >= 3 dirs
    poly[t].x() = (offset[t] * s1 - offset[u] * s0) / det;
    poly[t].y() = (offset[u] * c0 - offset[t] * c1) / det;
  }
  return poly;
}

// ---------------------------------------------------------------------------
// containment, union overbound, reduction

/// One-sided containment test: true certifies inner is a subset of outer
/// (every corner of inner's bounding box lies in outer); false means unknown.
inline bool contains_set_sufficient(const ConstrainedZonotope& inner,
                                    const ConstrainedZonotope& outer) {
  if (inner.dim() != outer.dim())
    throw std::invalid_argument("contains_set_sufficient: dimension mismatch");
  if (is_empty(inner)) return true;
  const int n = inner.dim();
  if (n > 16) return false;  // corner enumeration only pays off in low dimension
  const IntervalBox hull = interval_hull(inner);
  Vector corner(n);
  const std::uint64_t corners = std::uint64_t{1} << n;
  for (std::uint64_t mask = 0; mask < corners; ++mask) {
    for (int d = 0; d < n; ++d)
      corner(d) = (mask >> d) & 1 ? hull.upper(d) : hull.lower(d);
    if (!contains_point(outer, corner)) return false;
  }
  return true;
}

/// Box enclosure of a union: the interval hull of the member hulls, returned
/// as an unconstrained zonotope. Containment is guaranteed; minimal radius is
/// not attempted (empty members are skipped).
inline ConstrainedZonotope overbound_union(const std::vector<ConstrainedZonotope>& sets) {
  if (sets.empty()) throw std::invalid_argument("overbound_union: empty input list");
  bool seeded = false;
  Vector lo, up;
  for (const auto& s : sets) {
    if (is_empty(s)) continue;
    const IntervalBox h = interval_hull(s);
    if (!seeded) {
      lo = h.lower;
      up = h.upper;
      seeded = true;
    } else {
      lo = lo.cwiseMin(h.lower);
      up = up.cwiseMax(h.upper);
    }
  }
  if (!seeded) throw std::invalid_argument("overbound_union: all inputs empty");
  return ConstrainedZonotope(IntervalBox(lo, up).box_zonotope());
}

/// Girard reduction: keep the largest generators, box the rest. The output
/// has at most ceil(target_order * dim) generators and contains the input.
inline Zonotope reduce_generators(const Zonotope& z, double target_order) {
  if (!(target_order >= 1.0))
    throw std::invalid_argument("reduce_generators: target order must be >= 1");
  const int n = z.dim();
  const int xi = z.generator_count();
  const int target = static_cast<int>(std::ceil(target_order * n));
  if (xi <= target) return z;
  const int keep = target - n;
  std::vector<int> idx(xi);
  std::iota(idx.begin(), idx.end(), 0);
  Vector metric(xi);
  for (int j = 0; j < xi; ++j) {
    const auto col = z.generators.col(j);
    metric(j) = col.lpNorm<1>() - col.lpNorm<Eigen::Infinity>();
  }
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int a, int b) { return metric(a) > metric(b); });
  Matrix out(n, keep + n);
  for (int j = 0; j < keep; ++j) out.col(j) = z.generators.col(idx[j]);
  Vector boxed = Vector::Zero(n);
  for (int j = keep; j < xi; ++j) boxed += z.generators.col(idx[j]).cwiseAbs();
  out.rightCols(n) = boxed.asDiagonal();
  return Zonotope(z.center, std::move(out));
}

/// Generator reduction for constrained zonotopes via the standard lifting
/// <[c; -b], [G; A]>: reducing the lifted zonotope encloses it, and enclosure
/// of the lift encloses the slice A b = b, so the result contains the input.
inline ConstrainedZonotope reduce_generators(const ConstrainedZonotope& z, double target_order) {
  const int rows = z.constraint_count();
  if (rows == 0) return ConstrainedZonotope(reduce_generators(z.relaxed(), target_order));
  const int n = z.dim();
  Vector lift_center(n + rows);
  lift_center << z.center, -z.constraint_rhs;
  Matrix lift_gens(n + rows, z.generator_count());
  lift_gens << z.generators, z.constraint_lhs;
  const Zonotope reduced = reduce_generators(Zonotope(std::move(lift_center), std::move(lift_gens)),
                                             target_order);
  return ConstrainedZonotope(reduced.center.head(n), reduced.generators.topRows(n),
                             reduced.generators.bottomRows(rows), -reduced.center.tail(rows));
}

/// Replaces the constraint system by an equivalent one with rank(A) rows.
/// Left untouched when the system looks inconsistent (the set is then empty
/// and should be discarded by the caller instead).
inline ConstrainedZonotope drop_redundant_constraints(const ConstrainedZonotope& z) {
  const int rows = z.constraint_count();
  if (rows == 0 || z.generator_count() == 0) return z;
  const SvdResult s = svd(z.constraint_lhs);
  const int r = s.numeric_rank;
  if (r == rows) return z;
  const Matrix u1 = s.left_basis.leftCols(r);
  const Vector dropped = z.constraint_rhs - u1 * (u1.transpose() * z.constraint_rhs);
  if (inf_norm(dropped) > 1e-9 * std::max(1.0, inf_norm(z.constraint_rhs))) return z;
  return ConstrainedZonotope(z.center, z.generators,
                             u1.transpose() * z.constraint_lhs,
                             u1.transpose() * z.constraint_rhs);
}

/// Solves one constraint for one coefficient and substitutes it away, dropping
/// that coefficient's box restriction: removes one constraint and one
/// generator per round and always yields an enclosure of the input. Pivots are
/// chosen to minimize the enclosure growth (coefficients whose implied range
/// already fits in [-1,1] cost nothing).
inline ConstrainedZonotope eliminate_constraints(ConstrainedZonotope z, int max_rows) {
  if (max_rows < 0) throw std::invalid_argument("eliminate_constraints: negative row cap");
  while (z.constraint_count() > max_rows && z.generator_count() > 0) {
    const Matrix& a = z.constraint_lhs;
    const int rows = z.constraint_count();
    const int xi = z.generator_count();
    int best_r = -1, best_j = -1;
    double best_score = std::numeric_limits<double>::infinity();
    double best_pivot = 0.0;
    for (int r = 0; r < rows; ++r) {
      for (int j = 0; j < xi; ++j) {
        const double piv = std::abs(a(r, j));
        if (piv < 1e-9) continue;
        const double rest = a.row(r).cwiseAbs().sum() - piv;
        const double mid = std::abs(z.constraint_rhs(r)) / piv;
        const double excess = std::max(0.0, mid + rest / piv - 1.0);
        const double score = excess * z.generators.col(j).norm();
        if (score < best_score - 1e-15 ||
            (score < best_score + 1e-15 && piv > best_pivot)) {
          best_score = score;
          best_pivot = piv;
          best_r = r;
          best_j = j;
        }
      }
    }
    if (best_r < 0) break;  // all-zero constraint rows; nothing to substitute
    const double inv = 1.0 / a(best_r, best_j);
    const Vector lam_g = z.generators.col(best_j) * inv;
    const Vector lam_a = a.col(best_j) * inv;
    const Vector row = a.row(best_r).transpose();
    const double rhs_r = z.constraint_rhs(best_r);

    Vector center = z.center + lam_g * rhs_r;
    Matrix gens = z.generators - lam_g * row.transpose();
    Matrix lhs = a - lam_a * row.transpose();
    Vector rhs = z.constraint_rhs - lam_a * rhs_r;

    auto drop_col = [](const Matrix& m, int col) {
      Matrix out(m.rows(), m.cols() - 1);
      out << m.leftCols(col), m.rightCols(m.cols() - col - 1);
      return out;
    };
    auto drop_row = [](const Matrix& m, int row_i) {
      Matrix out(m.rows() - 1, m.cols());
      out << m.topRows(row_i), m.bottomRows(m.rows() - row_i - 1);
      return out;
    };
    Vector rhs_out(rows - 1);
    rhs_out << rhs.head(best_r), rhs.tail(rows - best_r - 1);
    z = ConstrainedZonotope(std::move(center), drop_col(gens, best_j),
                            drop_row(drop_col(lhs, best_j), best_r), std::move(rhs_out));
  }
  return z;
}

/// c + G b with b drawn uniformly from the coefficient box (uniform in
/// coefficient space, not in volume).
inline Vector sample_point(const Zonotope& z, Rng& rng) {
  return z.center + z.generators * rng.box(z.generator_count());
}

}  // namespace zonokit
