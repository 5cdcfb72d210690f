#include <benchmark/benchmark.h>

#include "itact/channel_cap.hpp"
#include "itact/closed_form.hpp"
#include "itact/coding_sim.hpp"
#include "itact/info.hpp"
#include "itact/source_rdc.hpp"

using namespace itact;

static void BM_MutualInformation(benchmark::State& state) {
  CounterRng rng(3);
  const auto spec = random_channel_spec(rng, 3, 3, 2, 3, 3, true);
  const Pmf pA(rng.dirichlet(3));
  const CondPmf pX({Var::A, Var::Se}, {3, 3}, {Var::X}, {3}, random_rows(rng, 9, 3));
  const auto joint = assemble_channel_joint(spec, pA, pX);
  for (auto _ : state) benchmark::DoNotOptimize(condition_slack(joint) + channel_objective(joint));
}
BENCHMARK(BM_MutualInformation);

static void BM_CapacityRewrite(benchmark::State& state) {
  const auto spec = rewrite_channel(0.1);
  OptOptions o;
  o.starts = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(capacity_ri(spec, o).capacity);
}
BENCHMARK(BM_CapacityRewrite)->Arg(8)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_CapacityMessageOnly(benchmark::State& state) {
  CounterRng rng(5);
  const auto spec = random_channel_spec(rng, 2, 2, 2, 2, 2);
  for (auto _ : state) benchmark::DoNotOptimize(capacity_message_only(spec).capacity);
}
BENCHMARK(BM_CapacityMessageOnly)->Unit(benchmark::kMillisecond);

static void BM_RateCr(benchmark::State& state) {
  const auto spec = binary_action_source(0.25);
  for (auto _ : state) benchmark::DoNotOptimize(rd_ac_cr(spec, {0.1, 0.5}).rate);
}
BENCHMARK(BM_RateCr)->Unit(benchmark::kMillisecond);

static void BM_RateNoCr(benchmark::State& state) {
  const auto spec = binary_action_source(0.25);
  for (auto _ : state) benchmark::DoNotOptimize(rd_ac(spec, {0.1, 1.0}).rate);
}
BENCHMARK(BM_RateNoCr)->Unit(benchmark::kMillisecond);

static void BM_RewriteClosedForm(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(rewrite_capacity(0.1, true).capacity);
}
BENCHMARK(BM_RewriteClosedForm)->Unit(benchmark::kMillisecond);

static void BM_SimulateSource(benchmark::State& state) {
  const auto spec = binary_action_source(0.25);
  const auto sol = rd_ac_cr(spec, {0.1, 1.0});
  SimParams p;
  p.n = static_cast<std::size_t>(state.range(0));
  p.trials = 200;
  p.epsilon = 0.7;
  for (auto _ : state)
    benchmark::DoNotOptimize(simulate_source_scheme(spec, sol.arg_paX, sol.arg_pXhat, p).empirical_distortion);
}
BENCHMARK(BM_SimulateSource)->Arg(8)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
