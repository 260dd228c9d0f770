#include "rglm/linalg.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <stdexcept>
#include <string>

namespace rglm {

namespace {

void require_finite(const Matrix& x, const char* who) {
  if (x.size() == 0) {
    throw std::invalid_argument(std::string(who) + ": empty matrix");
  }
  if (!x.allFinite()) {
    throw std::invalid_argument(std::string(who) + ": non-finite entries");
  }
}

}  // namespace

bool is_finite(const Matrix& x) { return x.allFinite(); }

Matrix SvdResult::reconstruct() const {
  if (singvals.size() == 0) {
    return Matrix::Zero(left.rows(), right.rows());
  }
  return left * singvals.asDiagonal() * right.transpose();
}

SvdResult svd_top_r(const Matrix& x, int r, double tol) {
  require_finite(x, "svd_top_r");
  const int min_dim = static_cast<int>(std::min(x.rows(), x.cols()));
  if (r < 1 || r > min_dim) {
    throw std::invalid_argument("svd_top_r: rank out of range");
  }
  if (!(tol > 0.0)) {
    throw std::invalid_argument("svd_top_r: tol must be positive");
  }
  Eigen::BDCSVD<Matrix> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const double cutoff = tol * s(0);
  int k = 0;
  while (k < r && s(k) > cutoff && s(k) > 0.0) ++k;
  SvdResult out;
  out.left = svd.matrixU().leftCols(k);
  out.singvals = s.head(k);
  out.right = svd.matrixV().leftCols(k);
  return out;
}

double op_norm(const Matrix& x, double tol) {
  require_finite(x, "op_norm");
  if (!(tol > 0.0)) {
    throw std::invalid_argument("op_norm: tol must be positive");
  }
  Eigen::BDCSVD<Matrix> svd(x);
  return svd.singularValues()(0);
}

NormTriple norms(const Matrix& x) {
  require_finite(x, "norms");
  Eigen::BDCSVD<Matrix> svd(x);
  return NormTriple{x.norm(), x.cwiseAbs().maxCoeff(),
                    svd.singularValues().sum()};
}

int numerical_rank(const Matrix& x, double rel_tol) {
  require_finite(x, "numerical_rank");
  Eigen::BDCSVD<Matrix> svd(x);
  const Vector& s = svd.singularValues();
  if (s(0) <= 0.0) return 0;
  const double cutoff = rel_tol * s(0);
  int k = 0;
  while (k < s.size() && s(k) > cutoff) ++k;
  return k;
}

}  // namespace rglm
