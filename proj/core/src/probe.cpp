#include "rglm/probe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace rglm {

namespace {

constexpr double kDegeneratePairTol = 1e-6;
constexpr int kMaxRedraws = 64;

Matrix random_feasible(int d1, int d2, int rank, const ConstraintSpec& spec,
                       Rng& rng) {
  Matrix m1(d1, rank);
  for (int i = 0; i < d1; ++i) {
    for (int j = 0; j < rank; ++j) m1(i, j) = rng.uniform(-0.5, 0.5);
  }
  Matrix m2(rank, d2);
  for (int i = 0; i < rank; ++i) {
    for (int j = 0; j < d2; ++j) m2(i, j) = rng.uniform(-0.5, 0.5);
  }
  return project(m1 * m2, rank, spec);
}

struct BregmanSample {
  double gap;
  double sq_dist;
};

BregmanSample bregman(const Dataset& data, const Matrix& x, const Matrix& y,
                      double sq_dist) {
  const double gap =
      loss(data, x) - loss(data, y) - grad(data, y).cwiseProduct(x - y).sum();
  return BregmanSample{gap, sq_dist};
}

}  // namespace

RscRsmEstimate empirical_rsc_rsm(const Dataset& data,
                                 const ConstraintSpec& spec, int rank,
                                 int trials, Rng& rng) {
  if (trials < 10) {
    throw std::invalid_argument("empirical_rsc_rsm: trials must be >= 10");
  }
  if (rank < 1) {
    throw std::invalid_argument("empirical_rsc_rsm: rank must be >= 1");
  }

  std::vector<BregmanSample> samples;
  samples.reserve(2 * trials);
  for (int trial = 0; trial < trials; ++trial) {
    bool accepted = false;
    for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
      const Matrix x = random_feasible(data.d1, data.d2, rank, spec, rng);
      const Matrix y = random_feasible(data.d1, data.d2, rank, spec, rng);
      const double dist = (x - y).norm();
      if (dist < kDegeneratePairTol) continue;
      const double sq = dist * dist;
      samples.push_back(bregman(data, x, y, sq));
      samples.push_back(bregman(data, y, x, sq));
      accepted = true;
      break;
    }
    if (!accepted) {
      throw std::invalid_argument(
          "empirical_rsc_rsm: sampled pairs are all degenerate");
    }
  }

  RscRsmEstimate est;
  est.trials = trials;
  est.rank_used = rank;
  est.alpha_hat = std::numeric_limits<double>::infinity();
  est.beta_hat = -std::numeric_limits<double>::infinity();
  for (const auto& s : samples) {
    const double ratio = 2.0 * s.gap / s.sq_dist;
    est.alpha_hat = std::min(est.alpha_hat, ratio);
    est.beta_hat = std::max(est.beta_hat, ratio);
  }
  const double alpha_tight = 1.01 * est.alpha_hat;
  const double beta_tight = 0.99 * est.beta_hat;
  for (const auto& s : samples) {
    est.eps_alpha_hat =
        std::max(est.eps_alpha_hat, 0.5 * alpha_tight * s.sq_dist - s.gap);
    est.eps_beta_hat =
        std::max(est.eps_beta_hat, s.gap - 0.5 * beta_tight * s.sq_dist);
  }
  return est;
}

double grad_norm_at_truth(const Dataset& data, const GroundTruth& truth) {
  return op_norm(grad(data, truth.x));
}

double statistical_floor(const RscRsmEstimate& est, double eps_grad, int r,
                         int t0, int true_rank) {
  if (!(est.alpha_hat > 0.0)) {
    throw std::invalid_argument("statistical_floor: alpha_hat must be > 0");
  }
  if (eps_grad < 0.0 || est.eps_alpha_hat < 0.0 || est.eps_beta_hat < 0.0) {
    throw std::invalid_argument("statistical_floor: negative error input");
  }
  if (r < 1 || t0 < 1 || true_rank < 1) {
    throw std::invalid_argument("statistical_floor: ranks and t0 must be >= 1");
  }
  const double a = est.alpha_hat;
  const double k = est.beta_hat / a;
  const double e = eps_grad;
  const double ea = est.eps_alpha_hat;
  const double eb = est.eps_beta_hat;
  const double rt = static_cast<double>(r) * t0;
  return (4.0 * k / a) * (rt + true_rank) * e * e +
         e * std::sqrt(8.0 * rt * ea / a) +
         e * std::sqrt(64.0 * rt * k * eb / a) + 2.0 * k * ea + 2.0 * eb;
}

double onebit_mc_population_hessian_ratio(const Matrix& x, const Matrix& d) {
  if (x.rows() != d.rows() || x.cols() != d.cols()) {
    throw std::invalid_argument(
        "onebit_mc_population_hessian_ratio: shape mismatch");
  }
  if (!x.allFinite() || !d.allFinite()) {
    throw std::invalid_argument(
        "onebit_mc_population_hessian_ratio: non-finite input");
  }
  const double denom = d.squaredNorm();
  if (denom == 0.0) {
    throw std::invalid_argument(
        "onebit_mc_population_hessian_ratio: direction must be nonzero");
  }
  const GlmFamily logistic = GlmFamily::logistic();
  const double scale =
      std::sqrt(static_cast<double>(x.rows()) * x.cols());
  double acc = 0.0;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      acc += psi_eval(logistic, scale * x(i, j)).second * d(i, j) * d(i, j);
    }
  }
  return acc / denom;
}

CurvatureBounds glm_curvature_bounds(const GlmFamily& family,
                                     double theta_max) {
  if (!(theta_max > 0.0)) {
    throw std::invalid_argument("glm_curvature_bounds: theta_max must be > 0");
  }
  if (family.kind == Family::kQuadratic) return CurvatureBounds{1.0, 1.0};
  return CurvatureBounds{psi_eval(family, theta_max).second, 0.25};
}

}  // namespace rglm
