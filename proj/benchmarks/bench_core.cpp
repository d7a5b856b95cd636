#include "tvnpn/clime.hpp"
#include "tvnpn/inference.hpp"
#include "tvnpn/kendall.hpp"
#include "tvnpn/lp.hpp"
#include "tvnpn/rng.hpp"
#include "tvnpn/simgen.hpp"
#include "tvnpn/studies.hpp"

#include <benchmark/benchmark.h>

#include <vector>

using namespace tvnpn;

namespace {

Simulation sim_for(Index n, Index d) {
  SimConfig cfg;
  cfg.d = d;
  cfg.e = d / 2;
  cfg.churn = std::max<Index>(1, d / 10);
  cfg.n = n;
  cfg.seed = 17;
  return simulate(cfg);
}

void BM_PairSummary(benchmark::State& state) {
  const auto sim = sim_for(state.range(0), state.range(1));
  const auto spec = TuningConfig{}.kernel_spec(sim.data.n());
  const ZOrder order(sim.data);
  for (auto _ : state) benchmark::DoNotOptimize(pair_summary(sim.data, spec, 0.5, order));
}
BENCHMARK(BM_PairSummary)->Args({500, 10})->Args({1000, 10})->Args({1000, 50});

void BM_ClimeColumn(benchmark::State& state) {
  const auto sim = sim_for(800, state.range(0));
  const Matrix sigma = sim.truth.sigma_of(0.5);
  for (auto _ : state) benchmark::DoNotOptimize(calibrated_clime_column(sigma, 0, 0.1, 0.5));
}
BENCHMARK(BM_ClimeColumn)->Arg(10)->Arg(25)->Arg(50);

void BM_LpDense(benchmark::State& state) {
  const auto m = state.range(0);
  Rng rng(3);
  Matrix a(m, 2 * m);
  Vector b(m), c(2 * m);
  for (Index r = 0; r < m; ++r) {
    for (Index v = 0; v < 2 * m; ++v) a(r, v) = rng.uniform(-1.0, 1.0);
    b[r] = rng.uniform(0.5, 2.0);
  }
  for (Index v = 0; v < 2 * m; ++v) c[v] = rng.uniform(-1.0, 0.0);
  a.conservativeResize(m + 1, Eigen::NoChange);
  a.row(m).setOnes();
  b.conservativeResize(m + 1);
  b[m] = 10.0;
  const std::vector<RowSense> sense(static_cast<std::size_t>(m + 1), RowSense::less_equal);
  for (auto _ : state) benchmark::DoNotOptimize(lp_solve(c, a, b, sense));
}
BENCHMARK(BM_LpDense)->Arg(20)->Arg(60)->Arg(120);

void BM_Bootstrap(benchmark::State& state) {
  const auto sim = sim_for(600, 10);
  TuningConfig t;
  const auto spec = t.kernel_spec(600);
  const auto clime = t.clime_config(600, 10);
  const auto ctx = make_score_context(sim.data, spec, 0.5, clime);
  const auto graph = knn_graph(10, 4);
  BootstrapOptions opt;
  opt.replicates = state.range(0);
  opt.mode = state.range(1) ? BootstrapMode::literal : BootstrapMode::linearized;
  for (auto _ : state) benchmark::DoNotOptimize(supergraph_test(ctx, graph, 0.05, opt));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Bootstrap)->Args({500, 0})->Args({500, 1})->Unit(benchmark::kMillisecond);

void BM_JackknifeVariance(benchmark::State& state) {
  const auto sim = sim_for(state.range(0), 10);
  TuningConfig t;
  const auto ctx = make_score_context(sim.data, t.kernel_spec(sim.data.n()), 0.5,
                                      t.clime_config(sim.data.n(), 10));
  for (auto _ : state) benchmark::DoNotOptimize(jackknife_variance(ctx, 0, 1));
}
BENCHMARK(BM_JackknifeVariance)->Arg(600)->Arg(1200);

}  // namespace

BENCHMARK_MAIN();
