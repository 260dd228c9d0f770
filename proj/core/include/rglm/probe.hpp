#pragma once

#include "rglm/glm.hpp"
#include "rglm/measure.hpp"
#include "rglm/project.hpp"
#include "rglm/rng.hpp"

namespace rglm {

// Sampled two-sided curvature estimate of the loss over the feasible set.
// alpha_hat/beta_hat are the smallest/largest observed Bregman ratios
// 2 B(X,Y) / ||X-Y||_F^2; the slacks are the additive terms needed to make
// every sampled pair satisfy the two-sided bound at
// (alpha_hat * 1.01, beta_hat * 0.99). Estimates, not certificates.
struct RscRsmEstimate {
  double alpha_hat = 0.0;
  double beta_hat = 0.0;
  double eps_alpha_hat = 0.0;
  double eps_beta_hat = 0.0;
  int trials = 0;
  int rank_used = 0;
};

// Samples `trials` pairs of rank <= rank feasible matrices (random factor
// products pushed through the projection; pairs closer than 1e-6 in
// Frobenius norm are redrawn) and evaluates the Bregman ratio in both
// directions for each pair. Requires trials >= 10.
RscRsmEstimate empirical_rsc_rsm(const Dataset& data,
                                 const ConstraintSpec& spec, int rank,
                                 int trials, Rng& rng);

// ||grad(data, truth.x)||_op, the gradient noise level at the truth.
double grad_norm_at_truth(const Dataset& data, const GroundTruth& truth);

// Additive error floor below which geometric decrease of the optimality gap
// is no longer guaranteed:
//   (4k/a)(r t0 + true_rank) e^2 + e sqrt(8 t0 r eps_a / a)
//     + e sqrt(64 t0 r k eps_b / a) + 2 k eps_a + 2 eps_b
// with k = beta_hat/alpha_hat, a = alpha_hat, e = eps_grad. Requires
// alpha_hat > 0.
double statistical_floor(const RscRsmEstimate& est, double eps_grad, int r,
                         int t0, int true_rank);

// Population curvature ratio of one-bit matrix completion:
// sum_ij psi''_logistic(sqrt(d1 d2) * X_ij) * D_ij^2 / ||D||_F^2.
double onebit_mc_population_hessian_ratio(const Matrix& x, const Matrix& d);

struct CurvatureBounds {
  double b_lower;
  double b_upper;
};

// inf/sup of psi'' over [-theta_max, theta_max]: (1,1) for quadratic,
// (psi''(theta_max), 1/4) for logistic. A scheduling condition number can be
// formed as 1.1 * b_upper / b_lower.
CurvatureBounds glm_curvature_bounds(const GlmFamily& family,
                                     double theta_max);

}  // namespace rglm
