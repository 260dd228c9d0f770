#pragma once

#include <variant>
#include <vector>

#include "rglm/linalg.hpp"
#include "rglm/rng.hpp"

namespace rglm {

struct GlmFamily;
struct Dataset;

// A single sensing operator A_i. Structured variants never materialize the
// dense matrix; <A,X> and gradient accumulation use index arithmetic.
struct DenseOp {
  Matrix a;
};

// A = scale * e_k e_l^T with scale = sqrt(d1*d2).
struct EntryOp {
  int k;
  int l;
  double scale;
};

// A = scale * e_k (e_l - e_j)^T with scale = sqrt(d1*d2); l == j is allowed
// and yields <A,X> = 0.
struct PairOp {
  int k;
  int l;
  int j;
  double scale;
};

// A = e_k e_l^T (scale fixed to 1); the Bernoulli-mask convention keeps the
// natural parameter unscaled.
struct MaskedEntryOp {
  int k;
  int l;
  double scale;
};

using MeasurementOp = std::variant<DenseOp, EntryOp, PairOp, MaskedEntryOp>;

// <A, X>.
double apply_op(const MeasurementOp& op, const Matrix& x);

// out += w * A.
void accumulate_op(const MeasurementOp& op, double w, Matrix& out);

// Throws std::invalid_argument if indices/dimensions do not fit d1 x d2 or a
// scale is nonpositive.
void validate_op(const MeasurementOp& op, int d1, int d2);

std::vector<MeasurementOp> gen_gaussian_ops(int d1, int d2, int n, Rng& rng);
std::vector<MeasurementOp> gen_entrywise_ops(int d1, int d2, int n, Rng& rng);
std::vector<MeasurementOp> gen_pairwise_ops(int d1, int d2, int n, Rng& rng);

struct GroundTruth {
  Matrix x;
  int rank;
  double spikiness;
};

// Normalization styles for synthetic ground truths: unit Frobenius norm, or
// max-entry norm fixed to 1/c.
struct UnitFro {};
struct InfScaled {
  double c;
};
using TruthStyle = std::variant<UnitFro, InfScaled>;

// X = M1 * M2 with Uniform[-0.5, 0.5] factor entries, normalized per style.
// Resamples in the (probability zero) event the product is rank deficient.
GroundTruth gen_ground_truth(int d1, int d2, int r, const TruthStyle& style,
                             Rng& rng);

// Same factor construction with each row of M2 centered first, so every row
// of X sums to zero; normalized to unit Frobenius norm. Used for the pairwise
// comparison experiments where row sums are unidentifiable.
GroundTruth gen_ground_truth_row_centered(int d1, int d2, int r, Rng& rng);

// sqrt(d1*d2) * ||X||_inf / ||X||_F; throws on the zero matrix.
double spikiness(const Matrix& x);

// Bernoulli mask over all cells: each (i,j) observed independently with
// probability p, response sampled from the family at natural parameter
// X_true[i,j] (unscaled), effective_n = p*d1*d2.
Dataset gen_bernoulli_mask_dataset(const Matrix& x_true, double p,
                                   const GlmFamily& family, Rng& rng);

// Responses sampled from the family at theta_i = <A_i, X_true>.
Dataset simulate_dataset(const Matrix& x_true,
                         std::vector<MeasurementOp> ops,
                         const GlmFamily& family, Rng& rng);

// Exact responses y_i = <A_i, X_true> (the sigma = 0 quadratic setting).
Dataset noiseless_dataset(const Matrix& x_true,
                          std::vector<MeasurementOp> ops,
                          const GlmFamily& family);

}  // namespace rglm
