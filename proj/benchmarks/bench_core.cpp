#include <benchmark/benchmark.h>

#include <random>

#include "actembed/regions.hpp"

using namespace actembed;

namespace {

std::vector<double> dirichlet(std::mt19937_64& rng, std::size_t n) {
  std::vector<double> p(n);
  double total = 0.0;
  for (auto& x : p) {
    x = -std::log(std::max(static_cast<double>(rng() >> 11) * 0x1.0p-53,
                           1e-300));
    total += x;
  }
  for (auto& x : p) x /= total;
  return p;
}

void BM_EntropySubset(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::vector<Alphabet> axes = {Alphabet::indexed("X", 4),
                                Alphabet::indexed("Y", 4),
                                Alphabet::indexed("Z", 4)};
  JointDistribution j(axes, dirichlet(rng, 64));
  for (auto _ : state) {
    benchmark::DoNotOptimize(entropy(j, AxisMask{3}));
  }
}
BENCHMARK(BM_EntropySubset);

void BM_ChainCompose(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const SourceActionProblem p = zs_example(0.5);
  Alphabet u = Alphabet::indexed("U", 4);
  std::vector<double> table;
  for (int x = 0; x < 2; ++x) {
    auto row = dirichlet(rng, 16);
    table.insert(table.end(), row.begin(), row.end());
  }
  ConditionalPmf q({p.xhat2, p.a_alphabet(), u}, {p.x_alphabet()}, table);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        chain_compose({Factor(p.source), Factor(q), Factor(p.side_channel)}));
  }
}
BENCHMARK(BM_ChainCompose);

void BM_EvalNonCausal(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const SourceActionProblem p = zs_example(0.5);
  Alphabet u = Alphabet::indexed("U", static_cast<std::size_t>(state.range(0)));
  std::vector<double> table;
  for (int x = 0; x < 2; ++x) {
    auto row = dirichlet(rng, 4 * static_cast<std::size_t>(state.range(0)));
    table.insert(table.end(), row.begin(), row.end());
  }
  ConditionalPmf q({p.xhat2, p.a_alphabet(), u}, {p.x_alphabet()}, table);
  for (auto _ : state) {
    benchmark::DoNotOptimize(eval_non_causal(p, q));
  }
}
BENCHMARK(BM_EvalNonCausal)->Arg(2)->Arg(4)->Arg(9);

void BM_BinaryExampleSolve(benchmark::State& state) {
  SolverConfig config;
  config.grid_resolution = static_cast<int>(state.range(0));
  config.restarts = 4;
  config.refine_iters = 60;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        binary_example_point(0.5, 0.2, ObservationMode::NonCausal, config));
  }
}
BENCHMARK(BM_BinaryExampleSolve)->Arg(20)->Arg(60)->Unit(benchmark::kMillisecond);

void BM_ProbingSolve(benchmark::State& state) {
  SolverConfig config;
  config.grid_resolution = 60;
  config.restarts = 4;
  config.refine_iters = 60;
  const ProbingProblem p = probing_example(0.5, 1.0, 0.25);
  for (auto _ : state) {
    benchmark::DoNotOptimize(probing_sum_rate(p, 0.5, config));
  }
}
BENCHMARK(BM_ProbingSolve)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
