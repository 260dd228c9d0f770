#include "rglm/solve.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace rglm {

namespace {

constexpr double kDivergenceCap = 1e12;
constexpr double kRankRelTol = 1e-9;

void require_shape(const Dataset& data, const Matrix& x0) {
  if (x0.rows() != data.d1 || x0.cols() != data.d2) {
    throw std::invalid_argument("solver: initial point shape mismatch");
  }
  if (!x0.allFinite()) {
    throw std::invalid_argument("solver: initial point must be finite");
  }
}

TraceRow make_row(int t, double eta, double objective, const Matrix& x,
                  const GroundTruth* truth, double truth_obj) {
  TraceRow row;
  row.t = t;
  row.eta = eta;
  row.objective = objective;
  if (truth) {
    const double dist = (x - truth->x).norm();
    const double denom = truth->x.norm();
    row.h = objective - truth_obj;
    row.rel_dist = denom > 0.0 ? dist / denom : dist;
  }
  row.num_rank = numerical_rank(x, kRankRelTol);
  row.fro = x.norm();
  return row;
}

// Rows carry t = 1, 2, ... in order, so the row with t = best_index lives at
// rows[best_index - 1].
void push_row(SolveTrace& trace, TraceRow row) {
  if (!std::isfinite(row.objective) || row.objective > kDivergenceCap) {
    throw DivergenceError("solver diverged: objective blew up", trace);
  }
  const bool improved =
      trace.rows.empty() ||
      row.objective < trace.rows[trace.best_index - 1].objective;
  const int t = row.t;
  trace.rows.push_back(std::move(row));
  if (improved) trace.best_index = t;
}

}  // namespace

Schedule default_schedule(double kappa) {
  if (!(kappa >= 1.0)) {
    throw std::invalid_argument("default_schedule: kappa must be >= 1");
  }
  Schedule s;
  s.t0 =
      static_cast<int>(std::ceil(4.0 * kappa * (std::log(4.0 * kappa) + 1.0)));
  s.eta0 = 1.0 / (4.0 * kappa);
  return s;
}

SolveResult avpg(const Dataset& data, const ConstraintSpec& spec,
                 const AvpgConfig& config, const Matrix& x0,
                 const GroundTruth* truth) {
  require_shape(data, x0);
  if (config.r < 1) throw std::invalid_argument("avpg: rank must be >= 1");
  if (!(config.beta > 0.0)) {
    throw std::invalid_argument("avpg: beta must be positive");
  }
  if (!(config.eta0 > 0.0) || config.eta0 > 1.0) {
    throw std::invalid_argument("avpg: eta0 must lie in (0, 1]");
  }
  if (config.t0 < 1) throw std::invalid_argument("avpg: t0 must be >= 1");
  if (config.max_iter < 0) {
    throw std::invalid_argument("avpg: max_iter must be >= 0");
  }

  const auto eta_of = [&](int t) {
    return t % config.t0 == 0 ? 1.0 : config.eta0;
  };

  SolveTrace trace;
  ProjectStats stats;
  Matrix x = project(x0, config.r, spec, &stats);
  trace.max_inf_overshoot = stats.inf_overshoot;
  const double truth_obj = truth ? loss(data, truth->x) : 0.0;
  push_row(trace, make_row(1, eta_of(1), loss(data, x), x, truth, truth_obj));

  Matrix best = x;
  const double step = 1.0 / (2.0 * config.beta);

  for (int t = 1; t <= config.max_iter; ++t) {
    const Matrix g = grad(data, x);
    if (config.grad_tol > 0.0 && op_norm(g) <= config.grad_tol) break;
    const double eta = eta_of(t);
    const Matrix v = project(x - (step / eta) * g, config.r, spec, &stats);
    trace.max_inf_overshoot =
        std::max(trace.max_inf_overshoot, stats.inf_overshoot);
    x = (1.0 - eta) * x + eta * v;
    push_row(trace,
             make_row(t + 1, eta_of(t + 1), loss(data, x), x, truth, truth_obj));
    if (trace.best_index == t + 1) best = x;
  }

  SolveResult res;
  res.best = std::move(best);
  res.last = std::move(x);
  res.trace = std::move(trace);
  return res;
}

SolveResult pg(const Dataset& data, const ConstraintSpec& spec,
               const PgConfig& config, const Matrix& x0,
               const GroundTruth* truth) {
  require_shape(data, x0);
  if (config.r < 1) throw std::invalid_argument("pg: rank must be >= 1");
  if (!(config.step >= 0.0)) {
    throw std::invalid_argument("pg: step must be nonnegative");
  }
  if (config.max_iter < 0) {
    throw std::invalid_argument("pg: max_iter must be >= 0");
  }

  SolveTrace trace;
  ProjectStats stats;
  Matrix x = project(x0, config.r, spec, &stats);
  trace.max_inf_overshoot = stats.inf_overshoot;
  const double truth_obj = truth ? loss(data, truth->x) : 0.0;
  push_row(trace, make_row(1, 1.0, loss(data, x), x, truth, truth_obj));

  Matrix best = x;
  for (int t = 1; t <= config.max_iter; ++t) {
    const Matrix g = grad(data, x);
    if (config.grad_tol > 0.0 && op_norm(g) <= config.grad_tol) break;
    x = project(x - config.step * g, config.r, spec, &stats);
    trace.max_inf_overshoot =
        std::max(trace.max_inf_overshoot, stats.inf_overshoot);
    push_row(trace, make_row(t + 1, 1.0, loss(data, x), x, truth, truth_obj));
    if (trace.best_index == t + 1) best = x;
  }

  SolveResult res;
  res.best = std::move(best);
  res.last = std::move(x);
  res.trace = std::move(trace);
  return res;
}

std::vector<double> decay_envelope(const SolveTrace& trace, double kappa,
                                   int t0) {
  if (!(kappa >= 1.0)) {
    throw std::invalid_argument("decay_envelope: kappa must be >= 1");
  }
  if (t0 < 1) throw std::invalid_argument("decay_envelope: t0 must be >= 1");
  if (trace.rows.empty()) {
    throw std::invalid_argument("decay_envelope: empty trace");
  }
  if (!trace.rows.front().h.has_value()) {
    throw std::invalid_argument(
        "decay_envelope: trace lacks objective-gap annotations (truth "
        "required)");
  }
  const double h1 = *trace.rows.front().h;
  const double f = 1.0 - 1.0 / (4.0 * kappa);
  std::vector<double> env(trace.rows.size());
  double cur = h1;
  for (std::size_t i = 0; i < env.size(); ++i) {
    if (i > 0) {
      cur *= f;
      if (i % static_cast<std::size_t>(t0) == 0) cur *= 4.0 * kappa;
    }
    env[i] = cur;
  }
  return env;
}

}  // namespace rglm
