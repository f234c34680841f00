// Serial against OpenMP assembly and snapshot generation on the coarse mesh.

#include "crbm/workflow.hpp"

#include <benchmark/benchmark.h>
#include <omp.h>

using namespace crbm;

namespace {

const HertzModel& model() {
  static const HertzModel m{HertzConfig{}};
  return m;
}

void BM_Elasticity(benchmark::State& state) {
  const auto exec = state.range(0) ? Exec::Parallel : Exec::Serial;
  const auto& s = model().reference_space();
  const auto mat = model().config().material;
  for (auto _ : state) benchmark::DoNotOptimize(assemble_elasticity(s, mat, exec));
  state.SetLabel(state.range(0) ? "parallel" : "serial");
}
BENCHMARK(BM_Elasticity)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_H1Gram(benchmark::State& state) {
  const auto exec = state.range(0) ? Exec::Parallel : Exec::Serial;
  const auto& s = model().reference_space();
  for (auto _ : state) benchmark::DoNotOptimize(assemble_h1_gram(s, 1.0, exec));
  state.SetLabel(state.range(0) ? "parallel" : "serial");
}
BENCHMARK(BM_H1Gram)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

// Eight HF solves; range(0) is the thread count.
void BM_Snapshots(benchmark::State& state) {
  const int threads = static_cast<int>(state.range(0));
  const int saved = omp_get_max_threads();
  omp_set_num_threads(threads);
  const auto mus = parse_grid("0.7:0.075:8");
  SolverConfig sc;
  sc.keep_iterates = false;
  for (auto _ : state) {
    benchmark::DoNotOptimize(generate_training_data(model(), mus, sc));
  }
  omp_set_num_threads(saved);
}
BENCHMARK(BM_Snapshots)->Arg(1)->Arg(omp_get_num_procs())->Unit(benchmark::kMillisecond)->Iterations(1);

}  // namespace

BENCHMARK_MAIN();
