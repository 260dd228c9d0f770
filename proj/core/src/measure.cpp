#include "rglm/measure.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "rglm/glm.hpp"

namespace rglm {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Matrix uniform_factor(int rows, int cols, Rng& rng) {
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = rng.uniform(-0.5, 0.5);
  }
  return m;
}

}  // namespace

double apply_op(const MeasurementOp& op, const Matrix& x) {
  return std::visit(
      Overloaded{
          [&](const DenseOp& d) { return d.a.cwiseProduct(x).sum(); },
          [&](const EntryOp& e) { return e.scale * x(e.k, e.l); },
          [&](const PairOp& p) {
            return p.scale * (x(p.k, p.l) - x(p.k, p.j));
          },
          [&](const MaskedEntryOp& m) { return m.scale * x(m.k, m.l); },
      },
      op);
}

void accumulate_op(const MeasurementOp& op, double w, Matrix& out) {
  std::visit(Overloaded{
                 [&](const DenseOp& d) { out += w * d.a; },
                 [&](const EntryOp& e) { out(e.k, e.l) += w * e.scale; },
                 [&](const PairOp& p) {
                   out(p.k, p.l) += w * p.scale;
                   out(p.k, p.j) -= w * p.scale;
                 },
                 [&](const MaskedEntryOp& m) {
                   out(m.k, m.l) += w * m.scale;
                 },
             },
             op);
}

void validate_op(const MeasurementOp& op, int d1, int d2) {
  const auto check_index = [&](int k, int l) {
    if (k < 0 || k >= d1 || l < 0 || l >= d2) {
      throw std::invalid_argument("measurement op: index out of range");
    }
  };
  std::visit(Overloaded{
                 [&](const DenseOp& d) {
                   if (d.a.rows() != d1 || d.a.cols() != d2) {
                     throw std::invalid_argument(
                         "measurement op: dense shape mismatch");
                   }
                   if (!d.a.allFinite()) {
                     throw std::invalid_argument(
                         "measurement op: non-finite dense entries");
                   }
                 },
                 [&](const EntryOp& e) {
                   check_index(e.k, e.l);
                   if (!(e.scale > 0.0)) {
                     throw std::invalid_argument(
                         "measurement op: nonpositive scale");
                   }
                 },
                 [&](const PairOp& p) {
                   check_index(p.k, p.l);
                   check_index(p.k, p.j);
                   if (!(p.scale > 0.0)) {
                     throw std::invalid_argument(
                         "measurement op: nonpositive scale");
                   }
                 },
                 [&](const MaskedEntryOp& m) {
                   check_index(m.k, m.l);
                   if (!(m.scale > 0.0)) {
                     throw std::invalid_argument(
                         "measurement op: nonpositive scale");
                   }
                 },
             },
             op);
}

std::vector<MeasurementOp> gen_gaussian_ops(int d1, int d2, int n, Rng& rng) {
  if (d1 < 1 || d2 < 1 || n < 1) {
    throw std::invalid_argument("gen_gaussian_ops: bad sizes");
  }
  std::vector<MeasurementOp> ops;
  ops.reserve(n);
  for (int i = 0; i < n; ++i) {
    Matrix a(d1, d2);
    for (int r = 0; r < d1; ++r) {
      for (int c = 0; c < d2; ++c) a(r, c) = rng.normal();
    }
    ops.emplace_back(DenseOp{std::move(a)});
  }
  return ops;
}

std::vector<MeasurementOp> gen_entrywise_ops(int d1, int d2, int n, Rng& rng) {
  if (d1 < 1 || d2 < 1 || n < 1) {
    throw std::invalid_argument("gen_entrywise_ops: bad sizes");
  }
  const double scale = std::sqrt(static_cast<double>(d1) * d2);
  std::vector<MeasurementOp> ops;
  ops.reserve(n);
  for (int i = 0; i < n; ++i) {
    const int k = rng.uniform_int(d1);
    const int l = rng.uniform_int(d2);
    ops.emplace_back(EntryOp{k, l, scale});
  }
  return ops;
}

std::vector<MeasurementOp> gen_pairwise_ops(int d1, int d2, int n, Rng& rng) {
  if (d1 < 1 || d2 < 1 || n < 1) {
    throw std::invalid_argument("gen_pairwise_ops: bad sizes");
  }
  const double scale = std::sqrt(static_cast<double>(d1) * d2);
  std::vector<MeasurementOp> ops;
  ops.reserve(n);
  for (int i = 0; i < n; ++i) {
    const int k = rng.uniform_int(d1);
    const int l = rng.uniform_int(d2);
    const int j = rng.uniform_int(d2);
    ops.emplace_back(PairOp{k, l, j, scale});
  }
  return ops;
}

double spikiness(const Matrix& x) {
  if (!x.allFinite()) {
    throw std::invalid_argument("spikiness: non-finite entries");
  }
  const double fro = x.norm();
  if (fro == 0.0) {
    throw std::invalid_argument("spikiness: zero matrix");
  }
  const double dim = static_cast<double>(x.rows()) * x.cols();
  return std::sqrt(dim) * x.cwiseAbs().maxCoeff() / fro;
}

GroundTruth gen_ground_truth(int d1, int d2, int r, const TruthStyle& style,
                             Rng& rng) {
  if (r < 1 || r > std::min(d1, d2)) {
    throw std::invalid_argument("gen_ground_truth: rank out of range");
  }
  for (;;) {
    const Matrix m1 = uniform_factor(d1, r, rng);
    const Matrix m2 = uniform_factor(r, d2, rng);
    Matrix x = m1 * m2;
    if (numerical_rank(x, 1e-9) != r) continue;
    if (std::holds_alternative<UnitFro>(style)) {
      x /= x.norm();
    } else {
      const double c = std::get<InfScaled>(style).c;
      if (!(c > 0.0)) {
        throw std::invalid_argument("gen_ground_truth: scale must be positive");
      }
      x /= c * x.cwiseAbs().maxCoeff();
    }
    return GroundTruth{x, r, spikiness(x)};
  }
}

GroundTruth gen_ground_truth_row_centered(int d1, int d2, int r, Rng& rng) {
  if (r < 1 || r > std::min(d1, d2)) {
    throw std::invalid_argument(
        "gen_ground_truth_row_centered: rank out of range");
  }
  for (;;) {
    const Matrix m1 = uniform_factor(d1, r, rng);
    Matrix m2 = uniform_factor(r, d2, rng);
    // Centering the rows of M2 makes every row of M1*M2 sum to zero without
    // raising the rank.
    m2.colwise() -= m2.rowwise().mean();
    Matrix x = m1 * m2;
    if (numerical_rank(x, 1e-9) != r) continue;
    x /= x.norm();
    return GroundTruth{x, r, spikiness(x)};
  }
}

Dataset gen_bernoulli_mask_dataset(const Matrix& x_true, double p,
                                   const GlmFamily& family, Rng& rng) {
  if (!(p > 0.0) || p > 1.0) {
    throw std::invalid_argument("gen_bernoulli_mask_dataset: p not in (0,1]");
  }
  if (!x_true.allFinite() || x_true.size() == 0) {
    throw std::invalid_argument("gen_bernoulli_mask_dataset: bad truth");
  }
  const int d1 = static_cast<int>(x_true.rows());
  const int d2 = static_cast<int>(x_true.cols());
  std::vector<MeasurementOp> ops;
  std::vector<double> responses;
  for (int i = 0; i < d1; ++i) {
    for (int j = 0; j < d2; ++j) {
      if (p < 1.0 && !rng.bernoulli(p)) continue;
      ops.emplace_back(MaskedEntryOp{i, j, 1.0});
      responses.push_back(sample_response(family, x_true(i, j), rng));
    }
  }
  if (ops.empty()) {
    throw std::invalid_argument(
        "gen_bernoulli_mask_dataset: empty mask, retry with another seed");
  }
  const double effective_n = p * static_cast<double>(d1) * d2;
  return make_dataset(d1, d2, std::move(ops), std::move(responses), family,
                      effective_n);
}

Dataset simulate_dataset(const Matrix& x_true, std::vector<MeasurementOp> ops,
                         const GlmFamily& family, Rng& rng) {
  const int d1 = static_cast<int>(x_true.rows());
  const int d2 = static_cast<int>(x_true.cols());
  std::vector<double> responses;
  responses.reserve(ops.size());
  for (const auto& op : ops) {
    responses.push_back(sample_response(family, apply_op(op, x_true), rng));
  }
  return make_dataset(d1, d2, std::move(ops), std::move(responses), family);
}

Dataset noiseless_dataset(const Matrix& x_true,
                          std::vector<MeasurementOp> ops,
                          const GlmFamily& family) {
  if (family.kind != Family::kQuadratic) {
    throw std::invalid_argument(
        "noiseless_dataset: exact responses only make sense for quadratic");
  }
  const int d1 = static_cast<int>(x_true.rows());
  const int d2 = static_cast<int>(x_true.cols());
  std::vector<double> responses;
  responses.reserve(ops.size());
  for (const auto& op : ops) responses.push_back(apply_op(op, x_true));
  return make_dataset(d1, d2, std::move(ops), std::move(responses), family);
}

}  // namespace rglm
