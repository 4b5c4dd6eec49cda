#include <benchmark/benchmark.h>

#include "mpass/bench.hpp"
#include "mpass/bisect.hpp"
#include "mpass/loop.hpp"

using namespace mpass;

namespace {

Vector v2(double x, double y) { return (Vector(2) << x, y).finished(); }

void BM_FlowDoubleWell(benchmark::State& state) {
  const auto f = double_well().functional;
  const Tolerances tol;
  for (auto _ : state) benchmark::DoNotOptimize(integrate_flow(f, v2(0.5, 0.2), tol, StopCondition::settle()));
}
BENCHMARK(BM_FlowDoubleWell);

void BM_FlowBvp(benchmark::State& state) {
  const auto b = bvp_action(static_cast<int>(state.range(0)));
  const Vector x = 0.5 * b.saddles[0].point;
  const Tolerances tol;
  for (auto _ : state) benchmark::DoNotOptimize(integrate_flow(b.functional, x, tol, StopCondition::settle()));
}
BENCHMARK(BM_FlowBvp)->Arg(15)->Arg(63)->Unit(benchmark::kMillisecond);

void BM_Alg1bDoubleWell(benchmark::State& state) {
  const auto b = double_well();
  const auto atlas = make_atlas(b.functional, 0.5, {{1, v2(-1, 0)}, {2, v2(1, 0)}});
  Tolerances tol;
  tol.n_max = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_alg1b(b.functional, *b.default_path, atlas, tol));
}
BENCHMARK(BM_Alg1bDoubleWell)->Arg(10)->Arg(30)->Unit(benchmark::kMillisecond);

void BM_Alg1cBvp(benchmark::State& state) {
  const auto b = bvp_action(63);
  auto atlas = make_atlas(b.functional, b.recommended_c, {{1, b.minimizers[0].point}});
  atlas.escape_level = b.escape_level;
  Tolerances tol;
  tol.grad_tol = 1e-4;
  const auto& path = *b.default_path;
  for (auto _ : state)
    benchmark::DoNotOptimize(run_alg1c(b.functional, path.front(), path.back(), path, atlas, tol));
}
BENCHMARK(BM_Alg1cBvp)->Unit(benchmark::kMillisecond);

void BM_ThmMp2Hat(benchmark::State& state) {
  const auto b = tilted_hat(0.1);
  Tolerances tol;
  tol.grad_tol = 1e-6;
  const auto ctx = StrictMinContext::make(b.functional, v2(0, 1), 0.05, 0.5, *b.loop_c, tol.settle_tol);
  const auto atlas = make_atlas(b.functional, ctx.entry_level, {{1, v2(0, 1)}, {2, v2(0, -1)}});
  const auto oracle = winding_oracle(v2(0, 0));
  for (auto _ : state)
    benchmark::DoNotOptimize(run_thm_mp2(b.functional, unit_circle_loop(), ctx, oracle, atlas, tol));
}
BENCHMARK(BM_ThmMp2Hat)->Unit(benchmark::kMillisecond);

void BM_WindingPolyline(benchmark::State& state) {
  const auto loop = unit_circle_loop().sampled(static_cast<int>(state.range(0)));
  const Vector o = v2(0, 0);
  for (auto _ : state) benchmark::DoNotOptimize(winding_number(loop, o));
}
BENCHMARK(BM_WindingPolyline)->Arg(64)->Arg(4096);

}  // namespace
BENCHMARK_MAIN();
