#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rglm/glm.hpp"
#include "rglm/linalg.hpp"
#include "rglm/measure.hpp"
#include "rglm/project.hpp"

namespace rglm {

struct AvpgConfig {
  int r = 1;
  double eta0 = 0.25;    // averaging weight between period resets, in (0, 1]
  double beta = 1.0;     // smoothness estimate; gradient prefactor 1/(2 beta eta)
  int t0 = 10;           // period length; eta = 1 whenever t is a multiple of t0
  int max_iter = 500;
  double grad_tol = 0.0; // early stop on ||grad||_op; 0 disables the check
};

struct PgConfig {
  int r = 1;
  double step = 0.5;
  int max_iter = 500;
  double grad_tol = 0.0;
};

// One row per recorded iterate; t = 1 is the (defensively projected) start.
// h (objective minus the objective at the truth) and rel_dist are present
// only when the truth was supplied.
struct TraceRow {
  int t;
  double eta;
  double objective;
  std::optional<double> h;
  std::optional<double> rel_dist;
  int num_rank;
  double fro;
};

struct SolveTrace {
  std::vector<TraceRow> rows;
  // t of the row with minimal objective (first on ties).
  int best_index = 0;
  // Largest post-truncation infinity-norm overshoot reported by the
  // projection heuristics across the run; 0 for spectral specs.
  double max_inf_overshoot = 0.0;
};

struct SolveResult {
  Matrix best;  // iterate at best_index
  Matrix last;  // final iterate
  SolveTrace trace;
};

// Raised when the objective becomes non-finite or exceeds 1e12; carries the
// trace accumulated so far.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, SolveTrace trace)
      : std::runtime_error(what), trace_(std::move(trace)) {}
  const SolveTrace& trace() const { return trace_; }

 private:
  SolveTrace trace_;
};

// Averaged projected gradient: for t = 1..max_iter, eta = 1 if t mod t0 == 0
// else eta0; V = project(X - (1/(2 beta eta)) grad(X), r, spec);
// X <- (1-eta) X + eta V. Returns the best-objective iterate, the last
// iterate, and the full trace. X0 is projected once before the first step.
SolveResult avpg(const Dataset& data, const ConstraintSpec& spec,
                 const AvpgConfig& config, const Matrix& x0,
                 const GroundTruth* truth = nullptr);

// Plain projected gradient / IHT: X <- project(X - step grad(X), r, spec).
SolveResult pg(const Dataset& data, const ConstraintSpec& spec,
               const PgConfig& config, const Matrix& x0,
               const GroundTruth* truth = nullptr);

struct Schedule {
  int t0;
  double eta0;
};

// t0 = ceil(4 kappa (ln(4 kappa) + 1)), eta0 = 1/(4 kappa); requires
// kappa >= 1.
Schedule default_schedule(double kappa);

// Reference decay curve aligned with the trace rows: entry i (i steps after
// the start) is (1 - 1/(4 kappa))^i * (4 kappa)^floor(i/t0) * h_1, where h_1
// is the first recorded optimality gap. Requires a truth-annotated trace.
std::vector<double> decay_envelope(const SolveTrace& trace, double kappa,
                                   int t0);

}  // namespace rglm
