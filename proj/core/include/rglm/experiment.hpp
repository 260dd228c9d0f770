#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rglm/glm.hpp"
#include "rglm/probe.hpp"
#include "rglm/project.hpp"
#include "rglm/solve.hpp"

namespace rglm {

// Which sampling scheme and family a run uses:
//   one_bit_sensing     Gaussian ops, logistic responses
//   matrix_sensing      Gaussian ops, quadratic responses (noise sd sigma)
//   one_bit_completion  Bernoulli mask (mask_p) or scaled entrywise ops (n),
//                       logistic responses
//   matrix_completion   entrywise ops, quadratic responses
//   rank_aggregation    pairwise ops, logistic responses, row-centered truth
enum class ExperimentKind {
  kOneBitSensing,
  kMatrixSensing,
  kOneBitCompletion,
  kMatrixCompletion,
  kRankAggregation,
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kMatrixSensing;
  int d1 = 20;
  int d2 = 20;
  int true_rank = 1;
  // Exactly one of n / mask_p must be set; mask_p is only meaningful for
  // one_bit_completion.
  std::optional<int> n;
  std::optional<double> mask_p;
  // Quadratic noise standard deviation; 0 means exact responses. Ignored by
  // the logistic experiments.
  double sigma = 1.0;
  ConstraintSpec constraint = Unconstrained{};
  // When true and the constraint is FactorRowClip, a_u/a_v are recomputed
  // per seed from that seed's ground-truth factors (oracle-informed radii).
  bool factor_clip_from_truth = false;
  std::string solver = "pg";  // "pg" or "avpg"
  int rank = 1;               // rank fed to the projection
  int max_iter = 400;
  double grad_tol = 0.0;
  // Overrides; when absent the run probes the instance and uses
  // step = 1/(2 beta_hat) for pg, or beta_hat plus the default schedule of
  // kappa_hat = beta_hat/alpha_hat for avpg.
  std::optional<double> step;
  std::optional<double> eta0;
  std::optional<double> beta;
  std::optional<int> t0;
  double init_gamma = 1.0;
  int probe_trials = 25;
  std::vector<double> gamma_grid = {0.0, 0.5, 1.0, 2.0, 4.0};
  std::vector<std::uint64_t> seeds = {1};
  std::string output_dir = "out";
};

ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const std::string& path);
std::string experiment_config_to_json(const ExperimentConfig& config);

struct RunSummary {
  std::uint64_t seed = 0;
  double final_rel_dist = 0.0;
  double best_rel_dist = 0.0;
  double best_objective = 0.0;
  int iters = 0;
};

// One solver run per seed (truth, dataset, init and probe all derived
// deterministically from the seed). Writes trace_seed<k>.csv per seed plus
// summary.csv into output_dir and returns the summary rows in seed order.
// jobs > 1 runs seeds concurrently; outputs are identical either way.
std::vector<RunSummary> run_experiment(const ExperimentConfig& config,
                                       int jobs = 1);

struct InstanceBundle {
  GroundTruth truth;
  Dataset data;
};

// The seed's truth and dataset, exactly as run_experiment builds them.
InstanceBundle gen_instance(const ExperimentConfig& config,
                            std::uint64_t seed);

struct ProbeReport {
  std::uint64_t seed = 0;
  double alpha_hat = 0.0;
  double beta_hat = 0.0;
  double kappa_hat = 0.0;
  double eps_alpha_hat = 0.0;
  double eps_beta_hat = 0.0;
  double eps_grad_hat = 0.0;
  double eps_n_hat = 0.0;
  double spikiness = 0.0;
  int t0 = 0;
  double eta0 = 0.0;
  int trials = 0;
  int rank = 0;
};

// Builds the seed's instance, probes it, and derives the recommended
// schedule and error floor.
ProbeReport probe_report(const ExperimentConfig& config, std::uint64_t seed);

// Flat key=value text block.
std::string probe_report_to_text(const ProbeReport& report);
void save_probe_report(const ProbeReport& report, const std::string& path);

// One-bit sensing comparison defaults: d = 20, rank-1 unit-Frobenius truth,
// n = 1000 Gaussian ops, PG, 10 seeds, init_gamma 1. Pair with an
// Unconstrained arm for the regularized/unregularized comparison.
ExperimentConfig preset_onebit_sensing();

// One-bit completion comparison defaults: d = 100, rank 1, Bernoulli mask
// p = 0.5, oracle-informed FactorRowClip, PG, 5 seeds.
ExperimentConfig preset_onebit_mc();

double median(std::vector<double> values);

}  // namespace rglm
