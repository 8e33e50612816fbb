#pragma once

// All numeric tolerances live here so they can be audited in one place.

namespace zonokit::tol {

// SVD numeric rank: sigma counts toward the rank iff
// sigma > max(sigma_max * max(rows, cols) * kRankRel, kRankFloor).
inline constexpr double kRankRel = 1e-12;
inline constexpr double kRankFloor = 1e-12;

// SVD reconstruction acceptance: ||U S V^T - M||_inf <= kSvdReconstruct * max(1, ||M||_inf).
inline constexpr double kSvdReconstruct = 1e-9;

// Moore-Penrose identity acceptance.
inline constexpr double kPseudoInverse = 1e-8;

// Null-space basis: orthonormality and annihilation bound.
inline constexpr double kNullSpace = 1e-9;

// Linear programs: equality residual accepted on witnesses (scaled by
// max(1, ||b||_inf)) and box-bound slack.
inline constexpr double kLpFeasibility = 1e-7;
inline constexpr double kLpBounds = 1e-9;

// Simplex internals: reduced-cost optimality threshold and smallest usable pivot.
inline constexpr double kReducedCost = 1e-9;
inline constexpr double kPivot = 1e-9;

// Schur stability margin: stable iff rho_hat < 1 - kSchurMargin.
inline constexpr double kSchurMargin = 1e-9;

// Slack on the spectral-radius upper bound guarantee.
inline constexpr double kSpectralSlack = 1e-6;

// Slack allowed when asserting the state bound during simulation.
inline constexpr double kStateBoundSlack = 1e-9;

}  // namespace zonokit::tol
