#pragma once

#include <variant>

#include "rglm/linalg.hpp"

namespace rglm {

// Feasible sets C for the rank-constrained projection. The spectral variants
// (Unconstrained, FroBall, NucBall, SchattenP, OpNormBall) admit an exact
// nearest-point oracle through the singular values; FactorRowClip,
// AltInfBall and RowCenteredInf are heuristics with feasibility-only
// contracts.
struct Unconstrained {};

struct FroBall {
  double xi;
};

struct NucBall {
  double xi;
};

// p restricted to {1, 2}; p = 1 is NucBall, p = 2 is FroBall.
struct SchattenP {
  int p;
  double xi;
};

struct OpNormBall {
  double xi;
};

// Rank-r SVD U S V^T, then rows of U sqrt(S) clipped to l2 norm <= a_u and
// rows of V sqrt(S) to <= a_v; the result is the product of the clipped
// factors.
struct FactorRowClip {
  double a_u;
  double a_v;
};

// Alternate entrywise clipping to [-xi, xi] with rank-r truncation until the
// sweep change drops below tol or max_iters is hit; the result is always the
// truncation of a clipped iterate.
struct AltInfBall {
  double xi;
  int max_iters = 50;
  double tol = 1e-7;
};

// AltInfBall with row centering after each clip, for the row-sum-zero
// constraint of pairwise comparison models. Truncation preserves zero row
// sums, so the output rows sum to zero.
struct RowCenteredInf {
  double xi;
  int max_iters = 50;
  double tol = 1e-7;
};

using ConstraintSpec =
    std::variant<Unconstrained, FroBall, NucBall, SchattenP, OpNormBall,
                 FactorRowClip, AltInfBall, RowCenteredInf>;

// Diagnostics from the alternating heuristics.
struct ProjectStats {
  int sweeps = 0;
  // max(0, ||output||_inf - xi) after the final truncation.
  double inf_overshoot = 0.0;
};

// Nearest (Frobenius) matrix of rank <= r inside the constraint set; exact
// for spectral specs, heuristic for the others. Throws std::invalid_argument
// on invalid spec parameters, non-finite input, or r out of range.
Matrix project(const Matrix& x, int r, const ConstraintSpec& spec,
               ProjectStats* stats = nullptr);

enum class Ball { kL1, kL2, kLinf };

// Euclidean projection of a nonincreasing nonnegative vector onto the
// radius-xi ball (intersected with the nonnegative orthant, which is
// automatic here); output stays nonincreasing and nonnegative.
Vector project_singvals(const Vector& sigma, Ball ball, double xi);

}  // namespace rglm
