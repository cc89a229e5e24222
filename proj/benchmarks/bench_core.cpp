#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "medrec/dsm.hpp"
#include "medrec/experiments.hpp"
#include "medrec/forward.hpp"
#include "medrec/model.hpp"
#include "medrec/optimizer.hpp"
#include "medrec/regularization.hpp"

namespace {

using namespace medrec;

ScalarField random_field(const StaggeredGrid& grid, double lo, double hi, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(lo, hi);
  ScalarField f(grid);
  for (double& v : f.values()) v = d(rng);
  return f;
}

void BM_ForwardSolve(benchmark::State& state) {
  const StaggeredGrid grid(static_cast<int>(state.range(0)));
  const CoefficientPair q = rasterize_truth(make_example("ex1"), grid);
  const auto h = default_excitations(grid, 1);
  for (auto _ : state)
    benchmark::DoNotOptimize(solve_forward({q.sigma, q.mu, h[0], std::nullopt}));
}
BENCHMARK(BM_ForwardSolve)->Arg(25)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_NormalOperatorApply(benchmark::State& state) {
  const StaggeredGrid grid(static_cast<int>(state.range(0)));
  const StateNormalOperator op({random_field(grid, 0.5, 3, 1), random_field(grid, 0.5, 3, 2)});
  std::vector<double> x(op.dimension(), 1.0), y(op.dimension());
  for (auto _ : state) {
    op.apply_packed(x, y);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(op.dimension()));
}
BENCHMARK(BM_NormalOperatorApply)->Arg(50)->Arg(100);

void BM_StateSubproblem(benchmark::State& state) {
  const StaggeredGrid grid(static_cast<int>(state.range(0)));
  const CoefficientPair q = rasterize_truth(make_example("ex1"), grid);
  const auto data = generate_measurements(q.sigma, q.mu, default_excitations(grid, 1), 1);
  AdiConfig cfg;
  cfg.reg_sigma = cfg.reg_mu = RegConfig{0.0, 0.0, 0.5, 30.0};
  for (auto _ : state)
    benchmark::DoNotOptimize(solve_state_subproblem(q, data[0], cfg, StatePair(grid)));
}
BENCHMARK(BM_StateSubproblem)->Arg(25)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_DsmIndex(benchmark::State& state) {
  const StaggeredGrid grid(static_cast<int>(state.range(0)));
  const CoefficientPair q = rasterize_truth(make_example("ex1"), grid);
  const auto data = generate_measurements(q.sigma, q.mu, default_excitations(grid, 1), 2);
  const auto ref = homogeneous_reference(1.0, 1.0, std::vector{data[0].neumann}, 2);
  const std::vector<BoundaryData> df{data[0].dirichlet - ref[0]};
  for (auto _ : state) benchmark::DoNotOptimize(compute_index(df, grid));
}
BENCHMARK(BM_DsmIndex)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_Prox(benchmark::State& state) {
  const StaggeredGrid grid(static_cast<int>(state.range(0)));
  const ScalarField v = random_field(grid, -5.0, 40.0, 3);
  for (auto _ : state) benchmark::DoNotOptimize(prox_l1_box(v, 0.1, 0.5, 30.0));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(grid.cell_count()));
}
BENCHMARK(BM_Prox)->Arg(100);

void BM_AdiExample1(benchmark::State& state) {
  const StaggeredGrid grid(50);
  const ExampleSpec spec = make_example("ex1");
  const CoefficientPair q = rasterize_truth(spec, grid);
  const auto data = generate_measurements(q.sigma, q.mu, default_excitations(grid, 1), 2);
  AdiConfig cfg;
  cfg.max_outer = static_cast<int>(state.range(0));
  cfg.reg_sigma = spec.reg_sigma(spec.exact_params);
  cfg.reg_mu = spec.reg_mu(spec.exact_params);
  const CoefficientPair q0{ScalarField(grid, 1.0), ScalarField(grid, 1.0)};
  for (auto _ : state) benchmark::DoNotOptimize(adi_reconstruct(data, q0, cfg));
}
BENCHMARK(BM_AdiExample1)->Arg(5)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
