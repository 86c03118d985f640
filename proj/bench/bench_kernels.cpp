#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "kn/analysis/quadrature.hpp"
#include "kn/kernels/kernels.hpp"
#include "kn/metivier/oscillatory.hpp"
#include "kn/symbolic/parser.hpp"
#include "kn/weights/conjugate.hpp"

using kn::kernels::Exec;

namespace {

Exec exec_of(const benchmark::State& state) { return state.range(0) ? Exec::Parallel : Exec::Serial; }

void BM_SimpsonSum(benchmark::State& state) {
  const kn::sym::Compiled f(kn::sym::parse("exp(-x1^2-x2^2)*sin(3*x1*x2)", 2));
  const auto grid = kn::analysis::QuadratureGrid::uniform(2, static_cast<int>(state.range(1))).tensor(kn::Box::cube(2, -2, 2));
  for (auto _ : state) benchmark::DoNotOptimize(kn::kernels::weighted_abs2_sum(f, grid, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(grid.points()));
}
BENCHMARK(BM_SimpsonSum)->ArgsProduct({{0, 1}, {129, 513}})->ArgNames({"parallel", "nodes"});

void BM_OscillatoryMoments(benchmark::State& state) {
  const auto edges = kn::metivier::panel_edges(1.0, kn::metivier::truncation_radius(0.475, 12.0, 1e-12), 8.0);
  const auto rule = kn::metivier::kronrod_rule(edges);
  std::vector<double> w(rule.weights);
  for (std::size_t k = 0; k < w.size(); ++k) w[k] *= std::exp(-std::pow(rule.nodes[k], 0.475));
  std::vector<double> t(static_cast<std::size_t>(state.range(1)));
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = -0.1 + 0.2 * static_cast<double>(i) / static_cast<double>(t.size() - 1);
  for (auto _ : state) benchmark::DoNotOptimize(kn::kernels::oscillatory_moments(t, rule.nodes, w, 12, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(t.size() * rule.nodes.size()));
}
BENCHMARK(BM_OscillatoryMoments)->ArgsProduct({{0, 1}, {65, 257}})->ArgNames({"parallel", "points"})->Unit(benchmark::kMillisecond);

void BM_GridOracle(benchmark::State& state) {
  const auto w = kn::weights::Weight::explog(0.5, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(kn::weights::conjugate_grid_oracle(w, 10.0, 1e-11, exec_of(state)));
}
BENCHMARK(BM_GridOracle)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
