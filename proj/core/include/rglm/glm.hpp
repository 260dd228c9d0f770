#pragma once

#include <vector>

#include "rglm/linalg.hpp"
#include "rglm/measure.hpp"
#include "rglm/rng.hpp"

namespace rglm {

enum class Family { kQuadratic, kLogistic };

// Link family. noise_scale holds c(sigma): the response variance sigma^2 for
// the quadratic family, fixed to 1 for logistic.
struct GlmFamily {
  Family kind = Family::kQuadratic;
  double noise_scale = 1.0;

  static GlmFamily quadratic(double noise_scale = 1.0);
  static GlmFamily logistic();
};

struct PsiEval {
  double value;
  double first;
  double second;
};

// psi, psi', psi'' at theta. Logistic uses overflow-safe forms: for large
// |theta| the value tends to max(theta, 0), the derivative saturates at 0/1
// and the curvature decays like e^{-|theta|}.
PsiEval psi_eval(const GlmFamily& family, double theta);

// Quadratic: theta + sqrt(noise_scale) * N(0,1). Logistic: Bernoulli draw
// with success probability 1/(1+e^{-theta}).
double sample_response(const GlmFamily& family, double theta, Rng& rng);

// n measurement/response pairs plus model metadata. effective_n is the
// normalizing sample size: ops.size() ordinarily, p*d1*d2 for Bernoulli-mask
// data (which may exclude unobserved cells from ops).
struct Dataset {
  int d1 = 0;
  int d2 = 0;
  std::vector<MeasurementOp> ops;
  std::vector<double> responses;
  GlmFamily family;
  double effective_n = 0.0;
};

// Validating constructor helper; effective_n defaults to ops.size() when <= 0.
Dataset make_dataset(int d1, int d2, std::vector<MeasurementOp> ops,
                     std::vector<double> responses, const GlmFamily& family,
                     double effective_n = 0.0);

// (1/effective_n) * sum_i [psi(<X,A_i>) - y_i <A_i,X>], summed in index
// order (deterministic).
double loss(const Dataset& data, const Matrix& x);

// (1/effective_n) * sum_i (psi'(<X,A_i>) - y_i) A_i; structured ops touch
// only their cells.
Matrix grad(const Dataset& data, const Matrix& x);

// (1/effective_n) * sum_i psi''(<X,A_i>) <D,A_i>^2, i.e. the full quadratic
// form of the loss Hessian (no 1/2).
double hessian_quadform(const Dataset& data, const Matrix& x, const Matrix& d);

}  // namespace rglm
