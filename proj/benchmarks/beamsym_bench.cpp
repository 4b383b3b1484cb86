#include "beamsym/claws.hpp"
#include "beamsym/numlab.hpp"
#include "beamsym/painleve.hpp"
#include "beamsym/reduce.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace beamsym;
using models::ModelKind;

void BM_ExpandPower(benchmark::State& state) {
  const Expr e = pow(Expr::jet("u") + Expr::jet("u", "x") + Expr::independent("t") + Expr(Rational(1, 3)),
                     static_cast<long>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(expand(e));
}
BENCHMARK(BM_ExpandPower)->Arg(4)->Arg(8)->Arg(12);

void BM_SymmetryResidual(benchmark::State& state) {
  const auto model = models::make_model(static_cast<ModelKind>(state.range(0)));
  const auto cat = models::builtin_catalog(static_cast<ModelKind>(state.range(0)), models::SourceKind::None);
  for (auto _ : state)
    for (const auto& g : cat.generators) benchmark::DoNotOptimize(jet::symmetry_residual(g.field, model));
}
BENCHMARK(BM_SymmetryResidual)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

void BM_SolveDetermining(benchmark::State& state) {
  const auto model = models::make_model(ModelKind::EulerBernoulli);
  for (auto _ : state) benchmark::DoNotOptimize(jet::solve_determining(model, {static_cast<int>(state.range(0))}));
}
BENCHMARK(BM_SolveDetermining)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_PainleveEq02i(benchmark::State& state) {
  const auto ode = painleve::registry_ode("eq02i");
  for (auto _ : state) benchmark::DoNotOptimize(painleve::painleve_test(ode, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_PainleveEq02i)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_ConservedVector(benchmark::State& state) {
  const auto kind = static_cast<ModelKind>(state.range(0));
  const auto model = models::make_model(kind);
  const auto gens = claws::catalog_generators(kind);
  const auto mu = claws::default_multipliers().back();
  for (auto _ : state)
    for (const auto& g : gens) benchmark::DoNotOptimize(claws::conserved_vector(model, g, mu));
}
BENCHMARK(BM_ConservedVector)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

void BM_Simulate(benchmark::State& state) {
  const auto kind = static_cast<ModelKind>(state.range(0));
  numlab::GridSpec g;
  g.Nx = static_cast<int>(state.range(1));
  g.T = 0.5;
  g.frames = 2;
  g.params = {2, 0.5, 0.2};
  const Expr u0 = sin(Expr::independent("x") - Expr::independent("t"));
  int steps = 0;
  for (auto _ : state) steps = numlab::simulate(kind, g, u0).steps;
  state.counters["steps"] = steps;
}
BENCHMARK(BM_Simulate)->ArgsProduct({{0, 1, 2}, {64, 128}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
