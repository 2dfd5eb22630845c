#include <benchmark/benchmark.h>

#include "mh/existence.hpp"
#include "mh/families.hpp"
#include "mh/planner.hpp"

namespace {

void BM_verify_mh(benchmark::State& state) {
  const auto n = state.range(0);
  const auto h = mh::materialize(*mh::plan(n, 7));
  for (auto _ : state) benchmark::DoNotOptimize(mh::verify_mh(h, 7).verdict);
  state.SetComplexityN(n);
}
BENCHMARK(BM_verify_mh)->Arg(57)->Arg(113)->Arg(200)->Complexity();

void BM_kronecker(benchmark::State& state) {
  const auto a = mh::SignMatrix::j_minus_2i(static_cast<std::size_t>(state.range(0)));
  const auto b = mh::SignMatrix::j_minus_2i(11);
  for (auto _ : state) benchmark::DoNotOptimize(mh::kronecker(a, 7, b, 7));
}
BENCHMARK(BM_kronecker)->Arg(11)->Arg(32);

void BM_plan_and_materialize(benchmark::State& state) {
  const auto n = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(mh::materialize(*mh::plan(n, 7)));
}
BENCHMARK(BM_plan_and_materialize)->Arg(57)->Arg(200);

void BM_decide_m7_sweep(benchmark::State& state) {
  for (auto _ : state)
    for (std::int64_t n = 3; n <= 200; ++n) benchmark::DoNotOptimize(mh::decide(n, 7).status);
}
BENCHMARK(BM_decide_m7_sweep)->Unit(benchmark::kMillisecond);

void BM_search_exhaust_11_5(benchmark::State& state) {
  mh::search::SearchProblem p;
  p.n = 11;
  p.m = 5;
  p.mode = mh::search::Mode::Restricted;
  p.goal = mh::search::Goal::Exhaust;
  for (auto _ : state) benchmark::DoNotOptimize(mh::search::run(p).nodes_visited);
}
BENCHMARK(BM_search_exhaust_11_5)->Unit(benchmark::kMillisecond);

void BM_condition1_verify_big(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(mh::condition1_verify(11, 463, 397).r);
}
BENCHMARK(BM_condition1_verify_big)->Unit(benchmark::kMillisecond)->Iterations(3);

void BM_family10_giant(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(mh::family10_params(29, 5, 6).v);
}
BENCHMARK(BM_family10_giant);

}  // namespace
BENCHMARK_MAIN();
