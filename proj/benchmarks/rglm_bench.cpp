#include <benchmark/benchmark.h>

#include "rglm/glm.hpp"
#include "rglm/linalg.hpp"
#include "rglm/measure.hpp"
#include "rglm/project.hpp"
#include "rglm/rng.hpp"

namespace {

rglm::Matrix random_matrix(int d1, int d2, rglm::Rng& rng) {
  rglm::Matrix x(d1, d2);
  for (int i = 0; i < d1; ++i) {
    for (int j = 0; j < d2; ++j) x(i, j) = rng.normal();
  }
  return x;
}

void BM_SvdTopR(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  rglm::Rng rng(7);
  const rglm::Matrix x = random_matrix(d, d, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rglm::svd_top_r(x, 2));
  }
}
BENCHMARK(BM_SvdTopR)->Arg(20)->Arg(50)->Arg(100);

void BM_GradDense(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  rglm::Rng rng(7);
  const auto truth = rglm::gen_ground_truth(20, 20, 2, rglm::UnitFro{}, rng);
  auto ops = rglm::gen_gaussian_ops(20, 20, n, rng);
  const auto data = rglm::noiseless_dataset(truth.x, std::move(ops),
                                            rglm::GlmFamily::quadratic());
  const rglm::Matrix x = random_matrix(20, 20, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rglm::grad(data, x));
  }
}
BENCHMARK(BM_GradDense)->Arg(200)->Arg(1000);

void BM_GradMasked(benchmark::State& state) {
  rglm::Rng rng(7);
  const auto truth =
      rglm::gen_ground_truth(100, 100, 1, rglm::InfScaled{0.3}, rng);
  const auto data = rglm::gen_bernoulli_mask_dataset(
      truth.x, 0.5, rglm::GlmFamily::logistic(), rng);
  const rglm::Matrix x = random_matrix(100, 100, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rglm::grad(data, x));
  }
}
BENCHMARK(BM_GradMasked);

void BM_ProjectFroBall(benchmark::State& state) {
  rglm::Rng rng(7);
  const rglm::Matrix x = random_matrix(50, 50, rng);
  const rglm::ConstraintSpec spec = rglm::FroBall{1.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(rglm::project(x, 2, spec));
  }
}
BENCHMARK(BM_ProjectFroBall);

void BM_ProjectAltInf(benchmark::State& state) {
  rglm::Rng rng(7);
  const rglm::Matrix x = random_matrix(50, 50, rng);
  const rglm::ConstraintSpec spec = rglm::AltInfBall{0.5};
  for (auto _ : state) {
    benchmark::DoNotOptimize(rglm::project(x, 2, spec));
  }
}
BENCHMARK(BM_ProjectAltInf);

}  // namespace

BENCHMARK_MAIN();
