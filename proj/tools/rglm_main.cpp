#include <algorithm>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rglm/experiment.hpp"
#include "rglm/io.hpp"

namespace {

using rglm::ExperimentConfig;
using rglm::RunSummary;

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
};

ExperimentConfig load_config(const CommonOpts& opts) {
  ExperimentConfig config = rglm::load_experiment_config(opts.config_path);
  if (!opts.out_dir.empty()) config.output_dir = opts.out_dir;
  return config;
}

void print_summaries(const std::vector<RunSummary>& rows) {
  std::cout << "seed,final_rel_dist,best_rel_dist,best_objective,iters\n";
  for (const auto& row : rows) {
    std::cout << row.seed << ',' << rglm::format_double(row.final_rel_dist)
              << ',' << rglm::format_double(row.best_rel_dist) << ','
              << rglm::format_double(row.best_objective) << ',' << row.iters
              << '\n';
  }
}

double median_final(const std::vector<RunSummary>& rows) {
  std::vector<double> finals;
  finals.reserve(rows.size());
  for (const auto& row : rows) finals.push_back(row.final_rel_dist);
  return rglm::median(finals);
}

void cmd_gen(const CommonOpts& opts) {
  ExperimentConfig config = load_config(opts);
  std::filesystem::create_directories(config.output_dir);
  for (const std::uint64_t seed : config.seeds) {
    const auto bundle = rglm::gen_instance(config, seed);
    const std::string stem =
        config.output_dir + "/dataset_seed" + std::to_string(seed) + ".txt";
    rglm::save_dataset(bundle.data, stem);
    rglm::save_matrix(bundle.truth.x, config.output_dir + "/truth_seed" +
                                          std::to_string(seed) + ".txt");
    std::cout << "wrote " << stem << '\n';
  }
}

void cmd_solve(const CommonOpts& opts) {
  ExperimentConfig config = load_config(opts);
  print_summaries(rglm::run_experiment(config, opts.jobs));
}

void cmd_probe(const CommonOpts& opts) {
  ExperimentConfig config = load_config(opts);
  const std::uint64_t seed = opts.seed ? *opts.seed : config.seeds.front();
  const rglm::ProbeReport report = rglm::probe_report(config, seed);
  std::filesystem::create_directories(config.output_dir);
  rglm::save_probe_report(report, config.output_dir + "/probe_report.txt");
  std::cout << rglm::probe_report_to_text(report);
}

void run_comparison(ExperimentConfig base, const std::string& out_dir,
                    int jobs) {
  if (!out_dir.empty()) base.output_dir = out_dir;
  const std::string root = base.output_dir;

  ExperimentConfig constrained = base;
  constrained.output_dir = root + "/constrained";

  // The comparison arm drops the projection entirely: full rank, no ball.
  ExperimentConfig unconstrained = base;
  unconstrained.constraint = rglm::Unconstrained{};
  unconstrained.factor_clip_from_truth = false;
  unconstrained.rank = std::min(unconstrained.d1, unconstrained.d2);
  unconstrained.output_dir = root + "/unconstrained";

  const auto with = rglm::run_experiment(constrained, jobs);
  const auto without = rglm::run_experiment(unconstrained, jobs);
  std::cout << "constrained median final rel_dist: "
            << rglm::format_double(median_final(with)) << '\n'
            << "unconstrained median final rel_dist: "
            << rglm::format_double(median_final(without)) << '\n';
}

void cmd_sweep(const CommonOpts& opts) {
  ExperimentConfig config = load_config(opts);
  if (config.gamma_grid.empty()) {
    throw std::invalid_argument("sweep: gamma_grid is empty");
  }
  const std::string root = config.output_dir;
  std::filesystem::create_directories(root);
  std::ofstream out(root + "/sweep_summary.csv");
  if (!out) throw std::runtime_error("cannot write sweep summary");
  out << "gamma,median_final_rel_dist,median_best_rel_dist\n";
  for (const double gamma : config.gamma_grid) {
    ExperimentConfig run = config;
    run.init_gamma = gamma;
    run.output_dir = root + "/gamma_" + rglm::format_double(gamma);
    const auto rows = rglm::run_experiment(run, opts.jobs);
    std::vector<double> finals, bests;
    for (const auto& row : rows) {
      finals.push_back(row.final_rel_dist);
      bests.push_back(row.best_rel_dist);
    }
    out << rglm::format_double(gamma) << ','
        << rglm::format_double(rglm::median(finals)) << ','
        << rglm::format_double(rglm::median(bests)) << '\n';
    std::cout << "gamma " << rglm::format_double(gamma)
              << " median final rel_dist "
              << rglm::format_double(rglm::median(finals)) << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Low-rank GLM experiment driver"};
  app.require_subcommand(1);

  CommonOpts opts;

  const auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* config_opt =
        sub->add_option("--config", opts.config_path, "experiment config JSON");
    if (needs_config) config_opt->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opts.out_dir, "output directory override");
    sub->add_option("--seed", opts.seed, "seed override (probe)");
    sub->add_option("--jobs", opts.jobs, "concurrent seed runs")
        ->check(CLI::PositiveNumber);
  };

  auto* gen = app.add_subcommand("gen", "generate datasets and truths");
  add_common(gen, true);
  auto* solve = app.add_subcommand("solve", "run the configured solver");
  add_common(solve, true);
  auto* probe = app.add_subcommand("probe", "probe curvature and error floor");
  add_common(probe, true);
  auto* sweep =
      app.add_subcommand("sweep", "run the solver across the init gamma grid");
  add_common(sweep, true);
  auto* repro_sensing = app.add_subcommand(
      "repro-onebit-sensing", "one-bit sensing comparison preset");
  add_common(repro_sensing, false);
  auto* repro_mc = app.add_subcommand("repro-onebit-mc",
                                      "one-bit completion comparison preset");
  add_common(repro_mc, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) cmd_gen(opts);
    if (solve->parsed()) cmd_solve(opts);
    if (probe->parsed()) cmd_probe(opts);
    if (sweep->parsed()) cmd_sweep(opts);
    if (repro_sensing->parsed()) {
      run_comparison(rglm::preset_onebit_sensing(), opts.out_dir, opts.jobs);
    }
    if (repro_mc->parsed()) {
      run_comparison(rglm::preset_onebit_mc(), opts.out_dir, opts.jobs);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
