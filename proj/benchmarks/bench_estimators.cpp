#include <benchmark/benchmark.h>

#include <filesystem>
#include <vector>

#include "fwmc/quantiles.hpp"
#include "fwmc/rng.hpp"
#include "fwmc/samplers.hpp"
#include "fwmc/stopping.hpp"
#include "fwmc/variance.hpp"

using namespace fwmc;

namespace {

std::vector<double> normal_trace(std::int64_t n) {
  Rng rng(1);
  std::vector<double> x(static_cast<std::size_t>(n));
  for (double& v : x) v = rng.normal();
  return x;
}

void BM_BatchMeansDirect(benchmark::State& state) {
  const auto x = normal_trace(state.range(0));
  const auto schedule = cbm_schedule(state.range(0), 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(batch_means(std::span<const double>(x), schedule));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BatchMeansDirect)->Range(1 << 10, 1 << 20);

void BM_BatchMeansPrefix(benchmark::State& state) {
  const auto x = normal_trace(state.range(0));
  PrefixSums sums;
  for (double v : x) sums.push(v);
  const auto schedule = cbm_schedule(state.range(0), 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(batch_means(sums, schedule));
}
BENCHMARK(BM_BatchMeansPrefix)->Range(1 << 10, 1 << 20);

void BM_TourMomentsAdd(benchmark::State& state) {
  TourMoments m;
  m.add({1, 0.5});
  m.add({2, 1.0});
  Tour t{3, 1.5};
  for (auto _ : state) {
    m.add(t);
    benchmark::DoNotOptimize(m.estimate());
  }
}
BENCHMARK(BM_TourMomentsAdd);

void BM_NormalQuantile(benchmark::State& state) {
  double p = 0.001;
  for (auto _ : state) {
    benchmark::DoNotOptimize(normal_quantile(p));
    p = p < 0.998 ? p + 0.001 : 0.001;
  }
}
BENCHMARK(BM_NormalQuantile);

void BM_StudentQuantile(benchmark::State& state) {
  const double df = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(student_t_quantile(df, 0.975));
}
BENCHMARK(BM_StudentQuantile)->Arg(5)->Arg(49)->Arg(1000);

void BM_CbmMonitorPerIteration(benchmark::State& state) {
  StoppingConfig cfg;
  cfg.epsilon = 1e-9;
  cfg.n_star = 45;
  Rng rng(2);
  for (auto _ : state) {
    BatchMeansMonitor m(ConsistentBatchMeans{0.5}, cfg, CheckpointPolicy::every(1));
    for (int i = 0; i < 2500; ++i) benchmark::DoNotOptimize(m.observe(rng.normal()));
  }
  state.SetItemsProcessed(state.iterations() * 2500);
}
BENCHMARK(BM_CbmMonitorPerIteration);

void BM_ParetoStep(benchmark::State& state) {
  ParetoSplitChain chain(ParetoIndepMH{}, 3);
  for (auto _ : state) benchmark::DoNotOptimize(chain.advance());
}
BENCHMARK(BM_ParetoStep);

void BM_GibbsSweep(benchmark::State& state) {
  const HierModel model(read_data_csv(std::filesystem::path(FWMC_DATA_DIR) / "hier_synthetic.csv"), 1.0, 2.0, 2.0);
  Rng rng(4);
  GibbsState s = iid_posterior_draw(model, rng);
  for (auto _ : state) {
    gibbs_sweep(model, s, rng);
    benchmark::DoNotOptimize(s.lambda);
  }
}
BENCHMARK(BM_GibbsSweep);

void BM_IidPosteriorDraw(benchmark::State& state) {
  const HierModel model(read_data_csv(std::filesystem::path(FWMC_DATA_DIR) / "hier_synthetic.csv"), 1.0, 2.0, 2.0);
  Rng rng(5);
  for (auto _ : state) benchmark::DoNotOptimize(iid_posterior_draw(model, rng));
}
BENCHMARK(BM_IidPosteriorDraw);

}  // namespace

BENCHMARK_MAIN();
