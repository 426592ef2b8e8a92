#include <benchmark/benchmark.h>

#include "smp/expansions.hpp"
#include "smp/hitting.hpp"
#include "smp/model.hpp"
#include "smp/oracle.hpp"
#include "smp/random_model.hpp"
#include "smp/root.hpp"

namespace {

smp::SemiMarkovModel bench_model() {
  static const smp::SemiMarkovModel model = smp::random_model(4242);
  return model;
}

void BM_SolvePhi(benchmark::State& state) {
  const smp::SemiMarkovModel model = bench_model();
  const double eps = model.eps_max / 2.0;
  const int order = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(smp::solve_phi(model, eps, 0.05, 1, order));
  }
}
BENCHMARK(BM_SolvePhi)->Arg(0)->Arg(2)->Arg(6);

void BM_PhiExpansion(benchmark::State& state) {
  const smp::SemiMarkovModel model = bench_model();
  const int k = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(smp::phi_expansion(model, 0.05, 1, k));
  }
}
BENCHMARK(BM_PhiExpansion)->Arg(1)->Arg(3)->Arg(6);

void BM_OracleFirstHitting(benchmark::State& state) {
  const smp::SemiMarkovModel model = bench_model();
  const double eps = model.eps_max / 2.0;
  const int n_max = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(smp::dp_g(model, eps, 1, n_max));
  }
}
BENCHMARK(BM_OracleFirstHitting)->Arg(500)->Arg(2000);

void BM_CharacteristicRoot(benchmark::State& state) {
  const smp::SemiMarkovModel model = bench_model();
  const double eps = model.eps_max / 2.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(smp::characteristic_root(model, eps));
  }
}
BENCHMARK(BM_CharacteristicRoot);

}  // namespace
