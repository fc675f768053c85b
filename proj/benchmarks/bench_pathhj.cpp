#include <benchmark/benchmark.h>

#include "pathhj/bundle.hpp"
#include "pathhj/game.hpp"
#include "pathhj/presets.hpp"

namespace {

using namespace pathhj;

void BM_StepLinear(benchmark::State& state) {
  const auto d = assemble_discretization(M_PI, static_cast<int>(state.range(0)));
  const auto op = make_operator(OperatorKind::linear_laplacian, 2.0, d);
  const Vec x = d.sine_mode(1);
  const Vec g = 0.5 * d.sine_mode(2);
  for (auto _ : state) benchmark::DoNotOptimize(step(d, op, 0.1, x, g, 1.0 / 64));
}
BENCHMARK(BM_StepLinear)->Arg(16)->Arg(32)->Arg(128);

void BM_StepPLaplacian(benchmark::State& state) {
  const auto d = assemble_discretization(M_PI, static_cast<int>(state.range(0)));
  const auto op = make_operator(OperatorKind::p_laplacian, 4.0, d);
  const Vec x = d.sine_mode(1) - 0.5 * d.sine_mode(3);
  const Vec g = 0.5 * d.sine_mode(2);
  for (auto _ : state) benchmark::DoNotOptimize(step(d, op, 0.1, x, g, 1.0 / 64));
}
BENCHMARK(BM_StepPLaplacian)->Arg(16)->Arg(32)->Arg(128);

void BM_SampleBundle(benchmark::State& state) {
  const ControlProblem pb = make_preset("heat_control");
  const auto size = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        sample_bundle(pb.disc, pb.op, 0.0, pb.initial_history(), pb.Lf, size, 17));
  }
}
BENCHMARK(BM_SampleBundle)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_BruteForceValue(benchmark::State& state) {
  PresetOptions o;
  o.name = "heat_control";
  o.control_intervals = static_cast<std::size_t>(state.range(0));
  const ControlProblem pb = make_preset(o);
  const Path x0 = pb.initial_history();
  for (auto _ : state) benchmark::DoNotOptimize(brute_force_value(pb, 0.0, x0).value);
}
BENCHMARK(BM_BruteForceValue)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_TreeValue(benchmark::State& state) {
  const ControlProblem pb = make_preset("bilinear_game");
  const Path x0 = pb.initial_history();
  const auto K = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(tree_value(pb, 0.0, x0, K, TreeOrder::controller_first, 1u << 22).value);
  }
}
BENCHMARK(BM_TreeValue)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
