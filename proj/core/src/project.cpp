#include "rglm/project.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rglm {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_positive(double xi, const char* what) {
  if (!(xi > 0.0)) throw std::invalid_argument(what);
}

// Simplex/l1-ball projection by sort and threshold. Input entries are
// nonnegative (singular values); output preserves descending order.
Vector l1_ball_project(const Vector& s, double xi) {
  const double total = s.sum();
  if (total <= xi) return s;
  const int n = static_cast<int>(s.size());
  Vector sorted = s;
  std::sort(sorted.data(), sorted.data() + n, std::greater<double>());
  double cumsum = 0.0;
  double tau = 0.0;
  for (int i = 0; i < n; ++i) {
    cumsum += sorted(i);
    const double cand = (cumsum - xi) / (i + 1);
    if (cand < sorted(i)) {
      tau = cand;
    } else {
      break;
    }
  }
  Vector out = (s.array() - tau).max(0.0);
  return out;
}

Vector l2_ball_project(const Vector& s, double xi) {
  const double nrm = s.norm();
  if (nrm <= xi) return s;
  return s * (xi / nrm);
}

Vector linf_ball_project(const Vector& s, double xi) {
  return s.array().min(xi).matrix();
}

Matrix truncate_rank(const Matrix& x, int r) {
  return svd_top_r(x, r).reconstruct();
}

// Schatten-p ball for p in {1, 2}; p e {1,2,inf-coded} handled by callers.
Matrix spectral_project(const Matrix& x, int r, Ball ball, double xi) {
  SvdResult svd = svd_top_r(x, r);
  if (svd.singvals.size() == 0) return Matrix::Zero(x.rows(), x.cols());
  svd.singvals = project_singvals(svd.singvals, ball, xi);
  return svd.reconstruct();
}

Matrix factor_row_clip(const Matrix& x, int r, double a_u, double a_v) {
  require_positive(a_u, "project: row bound a_u must be positive");
  require_positive(a_v, "project: row bound a_v must be positive");
  const SvdResult svd = svd_top_r(x, r);
  if (svd.singvals.size() == 0) return Matrix::Zero(x.rows(), x.cols());
  const Vector root = svd.singvals.array().sqrt();
  Matrix u = svd.left * root.asDiagonal();
  Matrix v = svd.right * root.asDiagonal();
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    const double nrm = u.row(i).norm();
    if (nrm > a_u) u.row(i) *= a_u / nrm;
  }
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    const double nrm = v.row(i).norm();
    if (nrm > a_v) v.row(i) *= a_v / nrm;
  }
  return u * v.transpose();
}

Matrix alt_inf_ball(const Matrix& x, int r, const AltInfBall& spec,
                    ProjectStats* stats) {
  require_positive(spec.xi, "project: inf bound must be positive");
  require_positive(spec.tol, "project: tol must be positive");
  if (spec.max_iters < 1) {
    throw std::invalid_argument("project: max_iters must be >= 1");
  }
  Matrix z = x;
  int sweeps = 0;
  for (int it = 0; it < spec.max_iters; ++it) {
    const Matrix prev = z;
    z = z.array().min(spec.xi).max(-spec.xi).matrix();
    z = truncate_rank(z, r);
    ++sweeps;
    if ((z - prev).norm() <= spec.tol * std::max(1.0, prev.norm())) break;
  }
  // One more clip then truncate so the result is exactly low rank while the
  // reported overshoot stays honest.
  z = z.array().min(spec.xi).max(-spec.xi).matrix();
  z = truncate_rank(z, r);
  ++sweeps;
  if (stats) {
    stats->sweeps = sweeps;
    const double inf = z.cwiseAbs().maxCoeff();
    stats->inf_overshoot = std::max(0.0, inf - spec.xi);
  }
  return z;
}

Matrix row_centered_inf(const Matrix& x, int r, const RowCenteredInf& spec,
                        ProjectStats* stats) {
  require_positive(spec.xi, "project: inf bound must be positive");
  require_positive(spec.tol, "project: tol must be positive");
  if (spec.max_iters < 1) {
    throw std::invalid_argument("project: max_iters must be >= 1");
  }
  Matrix z = x;
  z.colwise() -= z.rowwise().mean();
  int sweeps = 0;
  for (int it = 0; it < spec.max_iters; ++it) {
    const Matrix prev = z;
    z = z.array().min(spec.xi).max(-spec.xi).matrix();
    z.colwise() -= z.rowwise().mean();
    // Rank truncation keeps zero row sums intact: the all-ones vector stays
    // orthogonal to the row space, so no re-centering is needed after it.
    z = truncate_rank(z, r);
    ++sweeps;
    if ((z - prev).norm() <= spec.tol * std::max(1.0, prev.norm())) break;
  }
  z = z.array().min(spec.xi).max(-spec.xi).matrix();
  z.colwise() -= z.rowwise().mean();
  z = truncate_rank(z, r);
  ++sweeps;
  if (stats) {
    stats->sweeps = sweeps;
    const double inf = z.cwiseAbs().maxCoeff();
    stats->inf_overshoot = std::max(0.0, inf - spec.xi);
  }
  return z;
}

}  // namespace

Vector project_singvals(const Vector& sigma, Ball ball, double xi) {
  require_positive(xi, "project_singvals: radius must be positive");
  if ((sigma.array() < 0.0).any()) {
    throw std::invalid_argument("project_singvals: negative singular value");
  }
  switch (ball) {
    case Ball::kL1:
      return l1_ball_project(sigma, xi);
    case Ball::kL2:
      return l2_ball_project(sigma, xi);
    case Ball::kLinf:
      return linf_ball_project(sigma, xi);
  }
  throw std::logic_error("project_singvals: unknown ball");
}

Matrix project(const Matrix& x, int r, const ConstraintSpec& spec,
               ProjectStats* stats) {
  if (x.size() == 0 || !x.allFinite()) {
    throw std::invalid_argument("project: input must be finite and nonempty");
  }
  if (r < 1) throw std::invalid_argument("project: rank must be >= 1");
  if (stats) *stats = ProjectStats{};
  return std::visit(
      Overloaded{
          [&](const Unconstrained&) { return truncate_rank(x, r); },
          [&](const FroBall& b) {
            require_positive(b.xi, "project: radius must be positive");
            return spectral_project(x, r, Ball::kL2, b.xi);
          },
          [&](const NucBall& b) {
            require_positive(b.xi, "project: radius must be positive");
            return spectral_project(x, r, Ball::kL1, b.xi);
          },
          [&](const SchattenP& b) {
            require_positive(b.xi, "project: radius must be positive");
            if (b.p == 1) return spectral_project(x, r, Ball::kL1, b.xi);
            if (b.p == 2) return spectral_project(x, r, Ball::kL2, b.xi);
            throw std::invalid_argument("project: schatten p must be 1 or 2");
          },
          [&](const OpNormBall& b) {
            require_positive(b.xi, "project: radius must be positive");
            return spectral_project(x, r, Ball::kLinf, b.xi);
          },
          [&](const FactorRowClip& b) {
            return factor_row_clip(x, r, b.a_u, b.a_v);
          },
          [&](const AltInfBall& b) { return alt_inf_ball(x, r, b, stats); },
          [&](const RowCenteredInf& b) {
            return row_centered_inf(x, r, b, stats);
          },
      },
      spec);
}

}  // namespace rglm
