#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "rglm/experiment.hpp"
#include "rglm/io.hpp"
#include "rglm/probe.hpp"
#include "rglm/solve.hpp"

using rglm::ExperimentConfig;
using rglm::ExperimentKind;

namespace {

namespace fs = std::filesystem;

fs::path fresh_dir(const std::string& leaf) {
  const fs::path p = fs::temp_directory_path() / "rglm_exp_tests" / leaf;
  fs::remove_all(p);
  return p;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(static_cast<bool>(in));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Rows of a comma-separated file, header dropped.
std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (line.empty() || line.back() == ',') fields.push_back("");
    rows.push_back(std::move(fields));
  }
  return rows;
}

ExperimentConfig small_sensing_config(const std::string& out_dir) {
  ExperimentConfig config;
  config.kind = ExperimentKind::kMatrixSensing;
  config.d1 = 8;
  config.d2 = 8;
  config.true_rank = 1;
  config.n = 60;
  config.sigma = 0.0;
  config.constraint = rglm::FroBall{1.2};
  config.solver = "avpg";
  config.rank = 1;
  config.max_iter = 30;
  config.probe_trials = 15;
  config.seeds = {1, 2, 3};
  config.output_dir = out_dir;
  return config;
}

void check_same_config(const ExperimentConfig& a, const ExperimentConfig& b) {
  CHECK(a.kind == b.kind);
  CHECK(a.d1 == b.d1);
  CHECK(a.d2 == b.d2);
  CHECK(a.true_rank == b.true_rank);
  CHECK(a.n == b.n);
  CHECK(a.mask_p == b.mask_p);
  CHECK(a.sigma == b.sigma);
  CHECK(rglm::constraint_to_json_text(a.constraint) ==
        rglm::constraint_to_json_text(b.constraint));
  CHECK(a.factor_clip_from_truth == b.factor_clip_from_truth);
  CHECK(a.solver == b.solver);
  CHECK(a.rank == b.rank);
  CHECK(a.max_iter == b.max_iter);
  CHECK(a.grad_tol == b.grad_tol);
  CHECK(a.step == b.step);
  CHECK(a.eta0 == b.eta0);
  CHECK(a.beta == b.beta);
  CHECK(a.t0 == b.t0);
  CHECK(a.init_gamma == b.init_gamma);
  CHECK(a.probe_trials == b.probe_trials);
  CHECK(a.gamma_grid == b.gamma_grid);
  CHECK(a.seeds == b.seeds);
  CHECK(a.output_dir == b.output_dir);
}

}  // namespace

TEST_CASE("config json round trip preserves every field") {
  ExperimentConfig c;
  c.kind = ExperimentKind::kOneBitCompletion;
  c.d1 = 30;
  c.d2 = 18;
  c.true_rank = 2;
  c.mask_p = 0.4;
  c.sigma = 0.7;
  c.constraint = rglm::AltInfBall{0.9, 12, 1e-5};
  c.factor_clip_from_truth = true;
  c.solver = "avpg";
  c.rank = 3;
  c.max_iter = 77;
  c.grad_tol = 1e-8;
  c.step = 0.2;
  c.eta0 = 0.5;
  c.beta = 1.7;
  c.t0 = 9;
  c.init_gamma = 2.5;
  c.probe_trials = 11;
  c.gamma_grid = {0.1, 0.9};
  c.seeds = {42, 7};
  c.output_dir = "some/dir";

  const std::string text = rglm::experiment_config_to_json(c);
  const ExperimentConfig back = rglm::parse_experiment_config(text);
  check_same_config(c, back);
  CHECK(rglm::experiment_config_to_json(back) == text);

  ExperimentConfig s;
  s.kind = ExperimentKind::kMatrixSensing;
  s.n = 500;
  const ExperimentConfig s_back =
      rglm::parse_experiment_config(rglm::experiment_config_to_json(s));
  check_same_config(s, s_back);
  CHECK(!s_back.mask_p.has_value());
  CHECK(!s_back.step.has_value());
}

TEST_CASE("config parser rejects malformed input") {
  const auto bad = [](const std::string& text) {
    CHECK_THROWS_AS(rglm::parse_experiment_config(text),
                    std::invalid_argument);
  };
  bad("not json at all");
  bad("[1,2,3]");
  bad(R"({"experimen": "matrix_sensing", "n": 10})");
  bad(R"({"experiment": "matrix_folding", "n": 10})");
  bad(R"({"experiment": "matrix_sensing"})");
  bad(R"({"experiment": "one_bit_completion", "n": 10, "mask_p": 0.5})");
  bad(R"({"experiment": "matrix_sensing", "mask_p": 0.5})");
  bad(R"({"experiment": "matrix_sensing", "n": 10, "d1": "ten"})");
  bad(R"({"experiment": "matrix_sensing", "n": 0})");
  bad(R"({"experiment": "one_bit_completion", "mask_p": 1.5})");
  bad(R"({"experiment": "matrix_sensing", "n": 10, "sigma": -1})");
  bad(R"({"experiment": "matrix_sensing", "n": 10, "solver": "sgd"})");
  bad(R"({"experiment": "matrix_sensing", "n": 10, "rank": 400})");
  bad(R"({"experiment": "matrix_sensing", "n": 10, "true_rank": 0})");
  bad(R"({"experiment": "matrix_sensing", "n": 10, "step": 0})");
  bad(R"({"experiment": "matrix_sensing", "n": 10, "eta0": 1.5})");
  bad(R"({"experiment": "matrix_sensing", "n": 10, "t0": 0})");
  bad(R"({"experiment": "matrix_sensing", "n": 10, "init_gamma": -1})");
  bad(R"({"experiment": "matrix_sensing", "n": 10, "probe_trials": 9})");
  bad(R"({"experiment": "matrix_sensing", "n": 10, "seeds": []})");
  bad(R"({"experiment": "matrix_sensing", "n": 10, "output_dir": ""})");
  bad(R"({"experiment": "matrix_sensing", "n": 10,
          "constraint": {"type": "mystery_ball"}})");
}

TEST_CASE("config file loading mirrors the string parser") {
  const fs::path dir = fresh_dir("cfg");
  fs::create_directories(dir);
  const fs::path path = dir / "config.json";
  ExperimentConfig c;
  c.kind = ExperimentKind::kMatrixCompletion;
  c.n = 200;
  c.seeds = {9};
  {
    std::ofstream out(path);
    out << rglm::experiment_config_to_json(c);
  }
  const ExperimentConfig back = rglm::load_experiment_config(path.string());
  check_same_config(c, back);
  CHECK_THROWS_AS(rglm::load_experiment_config((dir / "missing.json").string()),
                  std::runtime_error);
}

TEST_CASE("gen_instance is deterministic and matches the config") {
  ExperimentConfig c = small_sensing_config("unused");
  const auto a = rglm::gen_instance(c, 5);
  const auto b = rglm::gen_instance(c, 5);
  CHECK((a.truth.x - b.truth.x).norm() == 0.0);
  CHECK(a.truth.rank == 1);
  CHECK(a.data.responses == b.data.responses);
  CHECK(a.data.effective_n == b.data.effective_n);
  CHECK(a.data.d1 == 8);
  CHECK(a.data.d2 == 8);
  CHECK(a.data.ops.size() == 60);
  CHECK(a.truth.x.norm() == doctest::Approx(1.0).epsilon(1e-12));

  const auto other = rglm::gen_instance(c, 6);
  CHECK((a.truth.x - other.truth.x).norm() > 1e-6);

  ExperimentConfig mc;
  mc.kind = ExperimentKind::kOneBitCompletion;
  mc.d1 = 12;
  mc.d2 = 12;
  mc.mask_p = 0.5;
  const auto masked = rglm::gen_instance(mc, 3);
  CHECK(masked.data.effective_n == 72.0);
  CHECK(masked.data.ops.size() <= 144);
  for (double y : masked.data.responses) CHECK((y == 0.0 || y == 1.0));

  ExperimentConfig ra;
  ra.kind = ExperimentKind::kRankAggregation;
  ra.d1 = 10;
  ra.d2 = 8;
  ra.n = 120;
  const auto ranked = rglm::gen_instance(ra, 4);
  for (int i = 0; i < 10; ++i) {
    CHECK(std::abs(ranked.truth.x.row(i).sum()) <= 1e-12);
  }
  for (double y : ranked.data.responses) CHECK((y == 0.0 || y == 1.0));
}

TEST_CASE("run_experiment writes identical bytes across reruns and jobs") {
  const fs::path dir_a = fresh_dir("run_a");
  const fs::path dir_b = fresh_dir("run_b");
  const fs::path dir_c = fresh_dir("run_c");

  const auto sum_a = rglm::run_experiment(small_sensing_config(dir_a.string()));
  const auto sum_b = rglm::run_experiment(small_sensing_config(dir_b.string()));
  const auto sum_c =
      rglm::run_experiment(small_sensing_config(dir_c.string()), 2);

  REQUIRE(sum_a.size() == 3);
  REQUIRE(sum_b.size() == 3);
  REQUIRE(sum_c.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(sum_a[i].seed == sum_b[i].seed);
    CHECK(sum_a[i].final_rel_dist == sum_b[i].final_rel_dist);
    CHECK(sum_a[i].best_objective == sum_b[i].best_objective);
    CHECK(sum_a[i].seed == sum_c[i].seed);
    CHECK(sum_a[i].final_rel_dist == sum_c[i].final_rel_dist);
    CHECK(sum_a[i].best_rel_dist == sum_c[i].best_rel_dist);
    CHECK(sum_a[i].best_objective == sum_c[i].best_objective);
    CHECK(sum_a[i].iters == sum_c[i].iters);
  }
  for (const char* name :
       {"trace_seed1.csv", "trace_seed2.csv", "trace_seed3.csv",
        "summary.csv"}) {
    CAPTURE(name);
    CHECK(read_file(dir_a / name) == read_file(dir_b / name));
    CHECK(read_file(dir_a / name) == read_file(dir_c / name));
  }
}

TEST_CASE("summary rows agree with the trace files") {
  const fs::path dir = fresh_dir("run_summary");
  const ExperimentConfig config = small_sensing_config(dir.string());
  const auto summaries = rglm::run_experiment(config);

  const auto parsed = csv_rows(read_file(dir / "summary.csv"));
  REQUIRE(parsed.size() == summaries.size());

  for (std::size_t i = 0; i < summaries.size(); ++i) {
    const auto trace = csv_rows(read_file(
        dir / ("trace_seed" + std::to_string(summaries[i].seed) + ".csv")));
    REQUIRE(!trace.empty());
    double min_obj = std::stod(trace[0][2]);
    double min_rel = std::stod(trace[0][4]);
    for (const auto& row : trace) {
      REQUIRE(row.size() == 7);
      min_obj = std::min(min_obj, std::stod(row[2]));
      min_rel = std::min(min_rel, std::stod(row[4]));
    }
    CHECK(summaries[i].best_objective == min_obj);
    CHECK(summaries[i].best_rel_dist == min_rel);
    CHECK(summaries[i].final_rel_dist == std::stod(trace.back()[4]));
    CHECK(summaries[i].iters == static_cast<int>(trace.size()) - 1);

    REQUIRE(parsed[i].size() == 5);
    CHECK(std::stoull(parsed[i][0]) == summaries[i].seed);
    CHECK(std::stod(parsed[i][3]) == summaries[i].best_objective);
    CHECK(std::stoi(parsed[i][4]) == summaries[i].iters);
  }
}

TEST_CASE("zero init gamma starts every seed at the zero matrix") {
  const fs::path dir = fresh_dir("run_gamma0");
  ExperimentConfig config = small_sensing_config(dir.string());
  config.solver = "pg";
  config.step = 0.1;
  config.max_iter = 3;
  config.init_gamma = 0.0;
  config.constraint = rglm::Unconstrained{};
  config.seeds = {1, 2};
  rglm::run_experiment(config);
  for (std::uint64_t seed : config.seeds) {
    const auto trace = csv_rows(
        read_file(dir / ("trace_seed" + std::to_string(seed) + ".csv")));
    REQUIRE(!trace.empty());
    CHECK(trace[0][6] == "0");
    CHECK(trace[0][4] == "1");
  }
}

TEST_CASE("run_experiment surfaces unusable output directories") {
  const fs::path dir = fresh_dir("blocked");
  fs::create_directories(dir);
  const fs::path blocker = dir / "blocker";
  { std::ofstream out(blocker); out << "x"; }
  ExperimentConfig config = small_sensing_config((blocker / "sub").string());
  CHECK_THROWS_AS(rglm::run_experiment(config), std::runtime_error);
}

TEST_CASE("probe report is reproducible and internally consistent") {
  ExperimentConfig config = small_sensing_config("unused");
  config.n = 80;
  const auto r1 = rglm::probe_report(config, 11);
  const auto r2 = rglm::probe_report(config, 11);
  CHECK(r1.alpha_hat == r2.alpha_hat);
  CHECK(r1.beta_hat == r2.beta_hat);
  CHECK(r1.eps_n_hat == r2.eps_n_hat);
  CHECK(r1.t0 == r2.t0);

  CHECK(r1.alpha_hat > 0.0);
  CHECK(r1.alpha_hat <= r1.beta_hat);
  CHECK(r1.kappa_hat == std::max(1.0, r1.beta_hat / r1.alpha_hat));
  CHECK(r1.trials == config.probe_trials);
  CHECK(r1.rank == config.rank);
  CHECK(r1.spikiness > 0.0);

  const auto sched = rglm::default_schedule(r1.kappa_hat);
  CHECK(r1.t0 == sched.t0);
  CHECK(r1.eta0 == sched.eta0);

  rglm::RscRsmEstimate est;
  est.alpha_hat = r1.alpha_hat;
  est.beta_hat = r1.beta_hat;
  est.eps_alpha_hat = r1.eps_alpha_hat;
  est.eps_beta_hat = r1.eps_beta_hat;
  CHECK(r1.eps_n_hat == rglm::statistical_floor(est, r1.eps_grad_hat,
                                                config.rank, r1.t0,
                                                config.true_rank));

  const auto bundle = rglm::gen_instance(config, 11);
  CHECK(r1.eps_grad_hat == rglm::grad_norm_at_truth(bundle.data, bundle.truth));
  CHECK(r1.eps_grad_hat == 0.0);
  CHECK(r1.spikiness == rglm::spikiness(bundle.truth.x));
}

TEST_CASE("dense sampling drives the probed condition number toward one") {
  ExperimentConfig config;
  config.kind = ExperimentKind::kMatrixCompletion;
  config.d1 = 5;
  config.d2 = 5;
  config.true_rank = 1;
  config.n = 4000;
  config.sigma = 0.0;
  config.rank = 1;
  config.probe_trials = 15;
  const auto report = rglm::probe_report(config, 21);
  CHECK(report.kappa_hat >= 1.0);
  CHECK(report.kappa_hat <= 1.3);
}

TEST_CASE("probed error floor shrinks as the sample grows") {
  ExperimentConfig config = small_sensing_config("unused");
  config.d1 = 10;
  config.d2 = 10;
  config.sigma = 0.3;
  std::vector<double> medians;
  for (int n : {100, 200, 400}) {
    config.n = n;
    std::vector<double> floors;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      floors.push_back(rglm::probe_report(config, seed).eps_n_hat);
    }
    medians.push_back(rglm::median(floors));
  }
  CHECK(medians[1] < medians[0]);
  CHECK(medians[2] < medians[1]);
}

TEST_CASE("probe report text block lists every field") {
  ExperimentConfig config = small_sensing_config("unused");
  const auto report = rglm::probe_report(config, 13);
  const std::string text = rglm::probe_report_to_text(report);
  for (const char* key :
       {"seed=", "alpha_hat=", "beta_hat=", "kappa_hat=", "eps_alpha_hat=",
        "eps_beta_hat=", "eps_grad_hat=", "eps_n_hat=", "spikiness=", "t0=",
        "eta0=", "trials=", "rank="}) {
    CAPTURE(key);
    CHECK(text.find(key) != std::string::npos);
  }
  const fs::path dir = fresh_dir("probe_txt");
  fs::create_directories(dir);
  const fs::path path = dir / "probe.txt";
  rglm::save_probe_report(report, path.string());
  CHECK(read_file(path) == text);
}

TEST_CASE("presets describe the documented comparisons") {
  const ExperimentConfig sensing = rglm::preset_onebit_sensing();
  CHECK(sensing.kind == ExperimentKind::kOneBitSensing);
  CHECK(sensing.d1 == 20);
  CHECK(sensing.d2 == 20);
  CHECK(sensing.true_rank == 1);
  REQUIRE(sensing.n.has_value());
  CHECK(*sensing.n == 1000);
  CHECK(std::holds_alternative<rglm::FroBall>(sensing.constraint));
  CHECK(sensing.solver == "pg");
  CHECK(sensing.seeds.size() == 10);
  check_same_config(sensing, rglm::parse_experiment_config(
                                 rglm::experiment_config_to_json(sensing)));

  const ExperimentConfig mc = rglm::preset_onebit_mc();
  CHECK(mc.kind == ExperimentKind::kOneBitCompletion);
  CHECK(mc.d1 == 100);
  CHECK(mc.d2 == 100);
  REQUIRE(mc.mask_p.has_value());
  CHECK(*mc.mask_p == 0.5);
  CHECK(!mc.n.has_value());
  CHECK(std::holds_alternative<rglm::FactorRowClip>(mc.constraint));
  CHECK(mc.factor_clip_from_truth);
  CHECK(mc.seeds.size() == 5);
  check_same_config(
      mc, rglm::parse_experiment_config(rglm::experiment_config_to_json(mc)));
}

TEST_CASE("median helper") {
  CHECK(rglm::median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(rglm::median({4.0, 1.0, 3.0, 2.0}) == 2.5);
  CHECK(rglm::median({7.0}) == 7.0);
  CHECK_THROWS_AS(rglm::median({}), std::invalid_argument);
}
