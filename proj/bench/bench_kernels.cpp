#include <benchmark/benchmark.h>

#include <vector>

#include "mjflow/flow.hpp"
#include "mjflow/kernels.hpp"

using namespace mjflow;

namespace {

struct Fixture {
  FlowProblem problem{ProblemParams(2, 12, 6, 1)};
  Grid grid;
  Stencil stencil;
  QProfile q;
  std::vector<double> excess;
  std::vector<double> rate;
  std::vector<double> stage;

  explicit Fixture(int cells)
      : grid(make_grid(problem, cells)),
        stencil(build_stencil(problem, grid)),
        q(QProfile::canonical(problem.psi_lo, problem.psi_hi)),
        excess(initial_profile(problem, grid, InitKind::SubcriticalConcave).excess()),
        rate(excess.size()),
        stage(excess.size()) {}
};

template <auto Kernel>
void BM_flow_rate(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(Kernel(f.stencil, f.q, f.excess, f.rate));
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <auto Rate, auto Euler, auto Combine>
void BM_heun_step(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)));
  std::vector<double> next(f.excess.size());
  const double dt = 1e-9;
  for (auto _ : state) {
    Rate(f.stencil, f.q, f.excess, f.rate);
    Euler(f.excess, f.rate, dt, f.stage);
    Rate(f.stencil, f.q, f.stage, f.rate);
    Combine(f.excess, f.stage, f.rate, dt, next);
    benchmark::DoNotOptimize(next.data());
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_run(benchmark::State& state, Execution execution) {
  const FlowProblem problem(ProblemParams(2, 12, 6, 1));
  const FlowState init =
      initial_profile(problem, make_grid(problem, static_cast<int>(state.range(0))), InitKind::SubcriticalConcave);
  FlowConfig cfg;
  cfg.t_max = 0.05;
  cfg.execution = execution;
  for (auto _ : state) benchmark::DoNotOptimize(run(problem, cfg, init).final_state().t());
}

}  // namespace

BENCHMARK(BM_flow_rate<kernels::flow_rate_serial>)->RangeMultiplier(4)->Range(256, 65536);
BENCHMARK(BM_flow_rate<kernels::flow_rate_parallel>)->RangeMultiplier(4)->Range(256, 65536);
BENCHMARK(BM_heun_step<kernels::flow_rate_serial, kernels::euler_stage_serial,
                       kernels::heun_combine_serial>)
    ->RangeMultiplier(4)
    ->Range(256, 65536);
BENCHMARK(BM_heun_step<kernels::flow_rate_parallel, kernels::euler_stage_parallel,
                       kernels::heun_combine_parallel>)
    ->RangeMultiplier(4)
    ->Range(256, 65536);
BENCHMARK_CAPTURE(BM_run, serial, Execution::Serial)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_run, parallel, Execution::Parallel)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
