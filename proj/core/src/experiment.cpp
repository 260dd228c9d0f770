#include "rglm/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <utility>
#include <variant>

#include <nlohmann/json.hpp>

#include "rglm/io.hpp"

namespace rglm {

namespace {

const char* kind_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kOneBitSensing:
      return "one_bit_sensing";
    case ExperimentKind::kMatrixSensing:
      return "matrix_sensing";
    case ExperimentKind::kOneBitCompletion:
      return "one_bit_completion";
    case ExperimentKind::kMatrixCompletion:
      return "matrix_completion";
    case ExperimentKind::kRankAggregation:
      return "rank_aggregation";
  }
  throw std::logic_error("unknown experiment kind");
}

ExperimentKind kind_from_name(const std::string& name) {
  if (name == "one_bit_sensing") return ExperimentKind::kOneBitSensing;
  if (name == "matrix_sensing") return ExperimentKind::kMatrixSensing;
  if (name == "one_bit_completion") return ExperimentKind::kOneBitCompletion;
  if (name == "matrix_completion") return ExperimentKind::kMatrixCompletion;
  if (name == "rank_aggregation") return ExperimentKind::kRankAggregation;
  throw std::invalid_argument("config: unknown experiment '" + name + "'");
}

bool is_logistic(ExperimentKind kind) {
  return kind == ExperimentKind::kOneBitSensing ||
         kind == ExperimentKind::kOneBitCompletion ||
         kind == ExperimentKind::kRankAggregation;
}

void validate_config(const ExperimentConfig& config) {
  if (config.d1 < 1 || config.d2 < 1) {
    throw std::invalid_argument("config: dimensions must be >= 1");
  }
  const int dmin = std::min(config.d1, config.d2);
  if (config.true_rank < 1 || config.true_rank > dmin) {
    throw std::invalid_argument("config: true_rank out of range");
  }
  if (config.rank < 1 || config.rank > dmin) {
    throw std::invalid_argument("config: rank out of range");
  }
  if (config.n.has_value() == config.mask_p.has_value()) {
    throw std::invalid_argument("config: set exactly one of n / mask_p");
  }
  if (config.mask_p &&
      config.kind != ExperimentKind::kOneBitCompletion) {
    throw std::invalid_argument(
        "config: mask_p is only valid for one_bit_completion");
  }
  if (config.n && *config.n < 1) {
    throw std::invalid_argument("config: n must be >= 1");
  }
  if (config.mask_p && (!(*config.mask_p > 0.0) || *config.mask_p > 1.0)) {
    throw std::invalid_argument("config: mask_p must lie in (0, 1]");
  }
  if (config.sigma < 0.0) {
    throw std::invalid_argument("config: sigma must be >= 0");
  }
  if (config.solver != "pg" && config.solver != "avpg") {
    throw std::invalid_argument("config: solver must be pg or avpg");
  }
  if (config.max_iter < 0) {
    throw std::invalid_argument("config: max_iter must be >= 0");
  }
  if (config.grad_tol < 0.0) {
    throw std::invalid_argument("config: grad_tol must be >= 0");
  }
  if (config.step && !(*config.step > 0.0)) {
    throw std::invalid_argument("config: step must be positive");
  }
  if (config.eta0 && (!(*config.eta0 > 0.0) || *config.eta0 > 1.0)) {
    throw std::invalid_argument("config: eta0 must lie in (0, 1]");
  }
  if (config.beta && !(*config.beta > 0.0)) {
    throw std::invalid_argument("config: beta must be positive");
  }
  if (config.t0 && *config.t0 < 1) {
    throw std::invalid_argument("config: t0 must be >= 1");
  }
  if (config.init_gamma < 0.0) {
    throw std::invalid_argument("config: init_gamma must be >= 0");
  }
  if (config.probe_trials < 10) {
    throw std::invalid_argument("config: probe_trials must be >= 10");
  }
  if (config.seeds.empty()) {
    throw std::invalid_argument("config: seeds must be nonempty");
  }
  if (config.output_dir.empty()) {
    throw std::invalid_argument("config: output_dir must be nonempty");
  }
}

GroundTruth make_truth(const ExperimentConfig& config, Rng& rng) {
  switch (config.kind) {
    case ExperimentKind::kOneBitSensing:
    case ExperimentKind::kMatrixSensing:
    case ExperimentKind::kMatrixCompletion:
      return gen_ground_truth(config.d1, config.d2, config.true_rank,
                              UnitFro{}, rng);
    case ExperimentKind::kOneBitCompletion:
      return gen_ground_truth(config.d1, config.d2, config.true_rank,
                              InfScaled{0.3}, rng);
    case ExperimentKind::kRankAggregation:
      return gen_ground_truth_row_centered(config.d1, config.d2,
                                           config.true_rank, rng);
  }
  throw std::logic_error("unknown experiment kind");
}

Dataset make_data(const ExperimentConfig& config, const GroundTruth& truth,
                  Rng& rng) {
  const GlmFamily family =
      is_logistic(config.kind)
          ? GlmFamily::logistic()
          : GlmFamily::quadratic(config.sigma > 0.0 ? config.sigma *
                                                          config.sigma
                                                    : 1.0);
  const bool noiseless = !is_logistic(config.kind) && config.sigma == 0.0;

  std::vector<MeasurementOp> ops;
  switch (config.kind) {
    case ExperimentKind::kOneBitSensing:
    case ExperimentKind::kMatrixSensing:
      ops = gen_gaussian_ops(config.d1, config.d2, *config.n, rng);
      break;
    case ExperimentKind::kOneBitCompletion:
      if (config.mask_p) {
        return gen_bernoulli_mask_dataset(truth.x, *config.mask_p, family,
                                          rng);
      }
      ops = gen_entrywise_ops(config.d1, config.d2, *config.n, rng);
      break;
    case ExperimentKind::kMatrixCompletion:
      ops = gen_entrywise_ops(config.d1, config.d2, *config.n, rng);
      break;
    case ExperimentKind::kRankAggregation:
      ops = gen_pairwise_ops(config.d1, config.d2, *config.n, rng);
      break;
  }
  if (noiseless) return noiseless_dataset(truth.x, std::move(ops), family);
  return simulate_dataset(truth.x, std::move(ops), family, rng);
}

// X0 = gamma * X_init with X_init a random rank-`rank` product normalized by
// the experiment's convention: unit Frobenius norm for sensing and rank
// aggregation (rows of the second factor centered for the latter), max entry
// 2 for the completion runs.
Matrix make_init(const ExperimentConfig& config, Rng& rng) {
  for (;;) {
    Matrix m1(config.d1, config.rank);
    for (int i = 0; i < config.d1; ++i) {
      for (int j = 0; j < config.rank; ++j) m1(i, j) = rng.uniform(-0.5, 0.5);
    }
    Matrix m2(config.rank, config.d2);
    for (int i = 0; i < config.rank; ++i) {
      for (int j = 0; j < config.d2; ++j) m2(i, j) = rng.uniform(-0.5, 0.5);
    }
    if (config.kind == ExperimentKind::kRankAggregation) {
      m2.colwise() -= m2.rowwise().mean();
    }
    Matrix x = m1 * m2;
    switch (config.kind) {
      case ExperimentKind::kOneBitSensing:
      case ExperimentKind::kMatrixSensing:
      case ExperimentKind::kRankAggregation: {
        const double nrm = x.norm();
        if (nrm == 0.0) continue;
        x /= nrm;
        break;
      }
      case ExperimentKind::kOneBitCompletion:
      case ExperimentKind::kMatrixCompletion: {
        const double inf = x.cwiseAbs().maxCoeff();
        if (inf == 0.0) continue;
        x /= 0.5 * inf;
        break;
      }
    }
    return config.init_gamma * x;
  }
}

ConstraintSpec resolve_constraint(const ExperimentConfig& config,
                                  const GroundTruth& truth) {
  if (!config.factor_clip_from_truth ||
      !std::holds_alternative<FactorRowClip>(config.constraint)) {
    return config.constraint;
  }
  const SvdResult svd = svd_top_r(truth.x, truth.rank);
  const Vector root = svd.singvals.array().sqrt();
  const Matrix u = svd.left * root.asDiagonal();
  const Matrix v = svd.right * root.asDiagonal();
  FactorRowClip clip;
  clip.a_u = u.rowwise().norm().maxCoeff();
  clip.a_v = v.rowwise().norm().maxCoeff();
  return clip;
}

struct SeedRun {
  RunSummary summary;
  SolveTrace trace;
};

SeedRun run_single(const ExperimentConfig& config, std::uint64_t seed) {
  Rng rng(seed);
  const GroundTruth truth = make_truth(config, rng);
  const Dataset data = make_data(config, truth, rng);
  const Matrix x0 = make_init(config, rng);
  const ConstraintSpec spec = resolve_constraint(config, truth);

  const bool need_probe =
      config.solver == "pg"
          ? !config.step
          : !(config.beta && config.eta0 && config.t0);
  RscRsmEstimate est;
  if (need_probe) {
    est = empirical_rsc_rsm(data, spec, config.rank, config.probe_trials, rng);
    if (!(est.beta_hat > 0.0)) {
      throw std::runtime_error(
          "experiment: probed beta_hat is nonpositive; pass explicit solver "
          "parameters");
    }
  }

  SolveResult result;
  if (config.solver == "pg") {
    PgConfig pc;
    pc.r = config.rank;
    pc.step = config.step ? *config.step : 1.0 / (2.0 * est.beta_hat);
    pc.max_iter = config.max_iter;
    pc.grad_tol = config.grad_tol;
    result = pg(data, spec, pc, x0, &truth);
  } else {
    AvpgConfig ac;
    ac.r = config.rank;
    ac.beta = config.beta ? *config.beta : est.beta_hat;
    if (config.eta0 && config.t0) {
      ac.eta0 = *config.eta0;
      ac.t0 = *config.t0;
    } else {
      if (!(est.alpha_hat > 0.0)) {
        throw std::runtime_error(
            "experiment: probed alpha_hat is nonpositive; pass eta0 and t0 "
            "explicitly");
      }
      const Schedule sched =
          default_schedule(std::max(1.0, est.beta_hat / est.alpha_hat));
      ac.eta0 = config.eta0 ? *config.eta0 : sched.eta0;
      ac.t0 = config.t0 ? *config.t0 : sched.t0;
    }
    ac.max_iter = config.max_iter;
    ac.grad_tol = config.grad_tol;
    result = avpg(data, spec, ac, x0, &truth);
  }

  SeedRun run;
  run.trace = std::move(result.trace);
  run.summary.seed = seed;
  run.summary.final_rel_dist = *run.trace.rows.back().rel_dist;
  double best_rel = *run.trace.rows.front().rel_dist;
  for (const auto& row : run.trace.rows) {
    best_rel = std::min(best_rel, *row.rel_dist);
  }
  run.summary.best_rel_dist = best_rel;
  run.summary.best_objective =
      run.trace.rows[run.trace.best_index - 1].objective;
  run.summary.iters = static_cast<int>(run.trace.rows.size()) - 1;
  return run;
}

void write_summary_csv(const std::vector<RunSummary>& rows,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "seed,final_rel_dist,best_rel_dist,best_objective,iters\n";
  for (const auto& row : rows) {
    out << row.seed << ',' << format_double(row.final_rel_dist) << ','
        << format_double(row.best_rel_dist) << ','
        << format_double(row.best_objective) << ',' << row.iters << '\n';
  }
  if (!out) throw std::runtime_error("summary write failed: " + path);
}

nlohmann::json config_to_json_object(const ExperimentConfig& config) {
  nlohmann::json j;
  j["experiment"] = kind_name(config.kind);
  j["d1"] = config.d1;
  j["d2"] = config.d2;
  j["true_rank"] = config.true_rank;
  if (config.n) j["n"] = *config.n;
  if (config.mask_p) j["mask_p"] = *config.mask_p;
  j["sigma"] = config.sigma;
  j["constraint"] =
      nlohmann::json::parse(constraint_to_json_text(config.constraint));
  j["factor_clip_from_truth"] = config.factor_clip_from_truth;
  j["solver"] = config.solver;
  j["rank"] = config.rank;
  j["max_iter"] = config.max_iter;
  j["grad_tol"] = config.grad_tol;
  if (config.step) j["step"] = *config.step;
  if (config.eta0) j["eta0"] = *config.eta0;
  if (config.beta) j["beta"] = *config.beta;
  if (config.t0) j["t0"] = *config.t0;
  j["init_gamma"] = config.init_gamma;
  j["probe_trials"] = config.probe_trials;
  j["gamma_grid"] = config.gamma_grid;
  j["seeds"] = config.seeds;
  j["output_dir"] = config.output_dir;
  return j;
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config: bad json: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config: not an object");

  static const char* known[] = {
      "experiment", "d1",        "d2",
      "true_rank",  "n",         "mask_p",
      "sigma",      "constraint", "factor_clip_from_truth",
      "solver",     "rank",      "max_iter",
      "grad_tol",   "step",      "eta0",
      "beta",       "t0",        "init_gamma",
      "probe_trials", "gamma_grid", "seeds",
      "output_dir"};
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || item.key() == k;
    if (!ok) {
      throw std::invalid_argument("config: unknown key '" + item.key() + "'");
    }
  }

  ExperimentConfig config;
  try {
    if (j.contains("experiment")) {
      config.kind = kind_from_name(j["experiment"].get<std::string>());
    }
    if (j.contains("d1")) config.d1 = j["d1"].get<int>();
    if (j.contains("d2")) config.d2 = j["d2"].get<int>();
    if (j.contains("true_rank")) config.true_rank = j["true_rank"].get<int>();
    if (j.contains("n")) config.n = j["n"].get<int>();
    if (j.contains("mask_p")) config.mask_p = j["mask_p"].get<double>();
    if (j.contains("sigma")) config.sigma = j["sigma"].get<double>();
    if (j.contains("constraint")) {
      config.constraint = constraint_from_json_text(j["constraint"].dump());
    }
    if (j.contains("factor_clip_from_truth")) {
      config.factor_clip_from_truth = j["factor_clip_from_truth"].get<bool>();
    }
    if (j.contains("solver")) config.solver = j["solver"].get<std::string>();
    if (j.contains("rank")) config.rank = j["rank"].get<int>();
    if (j.contains("max_iter")) config.max_iter = j["max_iter"].get<int>();
    if (j.contains("grad_tol")) config.grad_tol = j["grad_tol"].get<double>();
    if (j.contains("step")) config.step = j["step"].get<double>();
    if (j.contains("eta0")) config.eta0 = j["eta0"].get<double>();
    if (j.contains("beta")) config.beta = j["beta"].get<double>();
    if (j.contains("t0")) config.t0 = j["t0"].get<int>();
    if (j.contains("init_gamma")) {
      config.init_gamma = j["init_gamma"].get<double>();
    }
    if (j.contains("probe_trials")) {
      config.probe_trials = j["probe_trials"].get<int>();
    }
    if (j.contains("gamma_grid")) {
      config.gamma_grid = j["gamma_grid"].get<std::vector<double>>();
    }
    if (j.contains("seeds")) {
      config.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
    }
    if (j.contains("output_dir")) {
      config.output_dir = j["output_dir"].get<std::string>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config: bad field type: ") +
                                e.what());
  }
  validate_config(config);
  return config;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_experiment_config(buf.str());
}

std::string experiment_config_to_json(const ExperimentConfig& config) {
  return config_to_json_object(config).dump(2);
}

std::vector<RunSummary> run_experiment(const ExperimentConfig& config,
                                       int jobs) {
  validate_config(config);
  std::error_code ec;
  std::filesystem::create_directories(config.output_dir, ec);
  if (ec) {
    throw std::runtime_error("cannot create output dir '" +
                             config.output_dir + "': " + ec.message());
  }

  const int n_seeds = static_cast<int>(config.seeds.size());
  std::vector<SeedRun> runs(n_seeds);
  const int workers = std::max(1, std::min(jobs, n_seeds));

  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  const auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n_seeds) return;
      try {
        runs[i] = run_single(config, config.seeds[i]);
        const std::string path = config.output_dir + "/trace_seed" +
                                 std::to_string(config.seeds[i]) + ".csv";
        save_trace_csv(runs[i].trace, path);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  std::vector<RunSummary> summaries;
  summaries.reserve(n_seeds);
  for (const auto& run : runs) summaries.push_back(run.summary);
  write_summary_csv(summaries, config.output_dir + "/summary.csv");
  return summaries;
}

InstanceBundle gen_instance(const ExperimentConfig& config,
                            std::uint64_t seed) {
  validate_config(config);
  Rng rng(seed);
  InstanceBundle bundle{make_truth(config, rng), Dataset{}};
  bundle.data = make_data(config, bundle.truth, rng);
  return bundle;
}

ProbeReport probe_report(const ExperimentConfig& config, std::uint64_t seed) {
  validate_config(config);
  Rng rng(seed);
  const GroundTruth truth = make_truth(config, rng);
  const Dataset data = make_data(config, truth, rng);
  const ConstraintSpec spec = resolve_constraint(config, truth);
  const RscRsmEstimate est =
      empirical_rsc_rsm(data, spec, config.rank, config.probe_trials, rng);
  if (!(est.alpha_hat > 0.0)) {
    throw std::runtime_error(
        "probe: alpha_hat is nonpositive; no schedule can be derived");
  }
  ProbeReport report;
  report.seed = seed;
  report.alpha_hat = est.alpha_hat;
  report.beta_hat = est.beta_hat;
  report.kappa_hat = std::max(1.0, est.beta_hat / est.alpha_hat);
  report.eps_alpha_hat = est.eps_alpha_hat;
  report.eps_beta_hat = est.eps_beta_hat;
  report.eps_grad_hat = grad_norm_at_truth(data, truth);
  const Schedule sched = default_schedule(report.kappa_hat);
  report.t0 = sched.t0;
  report.eta0 = sched.eta0;
  report.eps_n_hat = statistical_floor(est, report.eps_grad_hat, config.rank,
                                       sched.t0, config.true_rank);
  report.spikiness = truth.spikiness;
  report.trials = est.trials;
  report.rank = est.rank_used;
  return report;
}

std::string probe_report_to_text(const ProbeReport& report) {
  std::ostringstream out;
  out << "seed=" << report.seed << '\n'
      << "alpha_hat=" << format_double(report.alpha_hat) << '\n'
      << "beta_hat=" << format_double(report.beta_hat) << '\n'
      << "kappa_hat=" << format_double(report.kappa_hat) << '\n'
      << "eps_alpha_hat=" << format_double(report.eps_alpha_hat) << '\n'
      << "eps_beta_hat=" << format_double(report.eps_beta_hat) << '\n'
      << "eps_grad_hat=" << format_double(report.eps_grad_hat) << '\n'
      << "eps_n_hat=" << format_double(report.eps_n_hat) << '\n'
      << "spikiness=" << format_double(report.spikiness) << '\n'
      << "t0=" << report.t0 << '\n'
      << "eta0=" << format_double(report.eta0) << '\n'
      << "trials=" << report.trials << '\n'
      << "rank=" << report.rank << '\n';
  return out.str();
}

void save_probe_report(const ProbeReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << probe_report_to_text(report);
  if (!out) throw std::runtime_error("probe report write failed: " + path);
}

ExperimentConfig preset_onebit_sensing() {
  ExperimentConfig config;
  config.kind = ExperimentKind::kOneBitSensing;
  config.d1 = 20;
  config.d2 = 20;
  config.true_rank = 1;
  config.n = 1000;
  config.sigma = 1.0;
  config.constraint = FroBall{1.0};
  config.solver = "pg";
  config.rank = 1;
  config.max_iter = 400;
  config.init_gamma = 1.0;
  config.probe_trials = 25;
  config.seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  config.output_dir = "out-onebit-sensing";
  return config;
}

ExperimentConfig preset_onebit_mc() {
  ExperimentConfig config;
  config.kind = ExperimentKind::kOneBitCompletion;
  config.d1 = 100;
  config.d2 = 100;
  config.true_rank = 1;
  config.mask_p = 0.5;
  config.constraint = FactorRowClip{1.0, 1.0};
  config.factor_clip_from_truth = true;
  config.solver = "pg";
  config.rank = 1;
  config.max_iter = 500;
  config.init_gamma = 1.0;
  config.probe_trials = 25;
  config.seeds = {1, 2, 3, 4, 5};
  config.output_dir = "out-onebit-mc";
  return config;
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median: empty input");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace rglm
