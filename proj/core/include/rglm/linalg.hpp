#pragma once

#include <Eigen/Dense>

namespace rglm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Leading singular triples of a matrix. `left` is d1 x k with orthonormal
// columns, `singvals` holds k nonincreasing nonnegative values, `right` is
// d2 x k with orthonormal columns. k may be smaller than the requested rank
// when the matrix is (numerically) rank deficient, and is 0 for the zero
// matrix.
struct SvdResult {
  Matrix left;
  Vector singvals;
  Matrix right;

  // left * diag(singvals) * right^T, shaped d1 x d2 even when k = 0.
  Matrix reconstruct() const;
};

// Top k = min(r, numerical rank) singular triples. Singular values at or
// below tol * sigma_max count as zero. Throws std::invalid_argument on
// non-finite input, r out of [1, min(d1,d2)], or tol <= 0.
SvdResult svd_top_r(const Matrix& x, int r, double tol = 1e-12);

// Largest singular value; 0 exactly for the zero matrix. `tol` is the
// relative tolerance the result is accurate to.
double op_norm(const Matrix& x, double tol = 1e-12);

struct NormTriple {
  double fro;
  double inf;
  double nuclear;
};

// Frobenius, entrywise max, and nuclear norm in one pass.
NormTriple norms(const Matrix& x);

// Number of singular values above rel_tol * sigma_max; 0 for the zero matrix.
int numerical_rank(const Matrix& x, double rel_tol = 1e-9);

bool is_finite(const Matrix& x);

}  // namespace rglm
