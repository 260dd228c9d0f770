#include "rglm/glm.hpp"

#include <cmath>
#include <stdexcept>

namespace rglm {

GlmFamily GlmFamily::quadratic(double noise_scale) {
  if (!(noise_scale > 0.0)) {
    throw std::invalid_argument("GlmFamily: noise_scale must be positive");
  }
  return GlmFamily{Family::kQuadratic, noise_scale};
}

GlmFamily GlmFamily::logistic() { return GlmFamily{Family::kLogistic, 1.0}; }

PsiEval psi_eval(const GlmFamily& family, double theta) {
  if (!std::isfinite(theta)) {
    throw std::invalid_argument("psi_eval: non-finite theta");
  }
  if (family.kind == Family::kQuadratic) {
    return PsiEval{0.5 * theta * theta, theta, 1.0};
  }
  // log(1+e^t) = max(t,0) + log1p(e^{-|t|}) never overflows; the curvature
  // e^{-|t|}/(1+e^{-|t|})^2 is symmetric in the sign of theta.
  const double e = std::exp(-std::fabs(theta));
  const double value = std::fmax(theta, 0.0) + std::log1p(e);
  const double first = theta >= 0.0 ? 1.0 / (1.0 + e) : e / (1.0 + e);
  const double second = e / ((1.0 + e) * (1.0 + e));
  return PsiEval{value, first, second};
}

double sample_response(const GlmFamily& family, double theta, Rng& rng) {
  if (!std::isfinite(theta)) {
    throw std::invalid_argument("sample_response: non-finite theta");
  }
  if (family.kind == Family::kQuadratic) {
    return theta + std::sqrt(family.noise_scale) * rng.normal();
  }
  return rng.bernoulli(psi_eval(family, theta).first) ? 1.0 : 0.0;
}

Dataset make_dataset(int d1, int d2, std::vector<MeasurementOp> ops,
                     std::vector<double> responses, const GlmFamily& family,
                     double effective_n) {
  if (d1 < 1 || d2 < 1) {
    throw std::invalid_argument("make_dataset: bad dimensions");
  }
  if (ops.empty() || ops.size() != responses.size()) {
    throw std::invalid_argument("make_dataset: ops/responses size mismatch");
  }
  for (const auto& op : ops) validate_op(op, d1, d2);
  for (double y : responses) {
    if (!std::isfinite(y)) {
      throw std::invalid_argument("make_dataset: non-finite response");
    }
    if (family.kind == Family::kLogistic && y != 0.0 && y != 1.0) {
      throw std::invalid_argument(
          "make_dataset: logistic responses must be 0 or 1");
    }
  }
  if (effective_n <= 0.0) effective_n = static_cast<double>(ops.size());
  return Dataset{d1, d2, std::move(ops), std::move(responses), family,
                 effective_n};
}

namespace {

void check_dims(const Dataset& data, const Matrix& x, const char* who) {
  if (x.rows() != data.d1 || x.cols() != data.d2) {
    throw std::invalid_argument(std::string(who) + ": dimension mismatch");
  }
  if (!x.allFinite()) {
    throw std::invalid_argument(std::string(who) + ": non-finite entries");
  }
}

}  // namespace

double loss(const Dataset& data, const Matrix& x) {
  check_dims(data, x, "loss");
  double acc = 0.0;
  for (std::size_t i = 0; i < data.ops.size(); ++i) {
    const double theta = apply_op(data.ops[i], x);
    acc += psi_eval(data.family, theta).value - data.responses[i] * theta;
  }
  return acc / data.effective_n;
}

Matrix grad(const Dataset& data, const Matrix& x) {
  check_dims(data, x, "grad");
  Matrix g = Matrix::Zero(data.d1, data.d2);
  for (std::size_t i = 0; i < data.ops.size(); ++i) {
    const double theta = apply_op(data.ops[i], x);
    const double w = psi_eval(data.family, theta).first - data.responses[i];
    accumulate_op(data.ops[i], w, g);
  }
  g /= data.effective_n;
  return g;
}

double hessian_quadform(const Dataset& data, const Matrix& x,
                        const Matrix& d) {
  check_dims(data, x, "hessian_quadform");
  check_dims(data, d, "hessian_quadform");
  double acc = 0.0;
  for (std::size_t i = 0; i < data.ops.size(); ++i) {
    const double theta = apply_op(data.ops[i], x);
    const double ad = apply_op(data.ops[i], d);
    acc += psi_eval(data.family, theta).second * ad * ad;
  }
  return acc / data.effective_n;
}

}  // namespace rglm
