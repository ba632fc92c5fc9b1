// Serial reference path against the OpenMP kernels.

#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "fokker/action.hpp"
#include "fokker/solver.hpp"

using namespace fokker;

namespace {

Worldline wavy(double offset, double phase, std::size_t nodes, SwitchingProfile profile) {
  const double pi = std::numbers::pi;
  std::vector<FourVector> pts(nodes);
  std::vector<double> lapse(nodes);
  for (std::size_t k = 0; k < nodes; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(nodes - 1);
    pts[k] = {10.0 * t, offset + 0.3 * std::sin(2 * pi * t + phase), 0.3 * std::cos(pi * t + phase), 0.0};
    lapse[k] = 10.0;
  }
  return Worldline(std::move(pts), std::move(lapse), 1.0, profile);
}

struct Pair {
  Worldline a, b;
};

Pair pair(std::size_t nodes) {
  return {wavy(0.0, 0.2, nodes, SwitchingProfile::pulse(0.3, 1.0, 9.0, 1.0)),
          wavy(2.0, 1.1, nodes, SwitchingProfile::pulse(-0.2, 2.0, 8.0, 1.0))};
}

ActionOptions with(Execution e) {
  ActionOptions o;
  o.exec = e;
  return o;
}

void action(benchmark::State& state, Execution exec) {
  const auto p = pair(static_cast<std::size_t>(state.range(0)));
  const auto opts = with(exec);
  for (auto _ : state) benchmark::DoNotOptimize(fokker_action(p.a, p.b, opts).total);
  state.SetComplexityN(state.range(0));
}

void gradient(benchmark::State& state, Execution exec) {
  const auto p = pair(static_cast<std::size_t>(state.range(0)));
  const auto opts = with(exec);
  for (auto _ : state) benchmark::DoNotOptimize(action_gradient(p.a, p.b, opts).N1.data());
  state.SetComplexityN(state.range(0));
}

void grid_sizes(benchmark::internal::Benchmark* b) {
  for (int k : {65, 129, 257, 513, 1025}) b->Arg(k);
}

void small_grid_sizes(benchmark::internal::Benchmark* b) {
  for (int k : {65, 129, 257, 513}) b->Arg(k);
}

}  // namespace

BENCHMARK_CAPTURE(action, serial, Execution::serial)->Apply(grid_sizes)->Complexity();
BENCHMARK_CAPTURE(action, parallel, Execution::parallel)->Apply(grid_sizes)->Complexity();
BENCHMARK_CAPTURE(gradient, serial, Execution::serial)->Apply(small_grid_sizes)->Complexity();
BENCHMARK_CAPTURE(gradient, parallel, Execution::parallel)->Apply(small_grid_sizes)->Complexity();

BENCHMARK_MAIN();
