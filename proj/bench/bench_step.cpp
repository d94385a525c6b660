// Serial vs OpenMP split steps, whole-step and per kernel.

#include <benchmark/benchmark.h>

#include <vector>

#include "../src/kernels.hpp"
#include "ripplewave/pde_sim.hpp"
#include "ripplewave/rate_function.hpp"

namespace {

using namespace ripple;

ModelParams hopf_model() {
  return ModelParams{RateFunction::sigmoid_exp(2.5, 8.0, 10.0), RateFunction::constant(2.0)};
}

void step_with(benchmark::State& state, Backend backend) {
  const ModelParams m = hopf_model();
  const Grid g{static_cast<int>(state.range(0))};
  SimConfig cfg;
  cfg.dt = default_dt(g, m);
  cfg.backend = backend;
  Simulator sim(m, cfg, g);
  FieldState s = initial_conditions(parse_init("sine:0.1"), g, m, SystemKind::full);
  for (auto _ : state) {
    sim.step(s);
    benchmark::DoNotOptimize(s.u.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_StepSerial(benchmark::State& state) { step_with(state, Backend::serial); }
void BM_StepOpenMP(benchmark::State& state) { step_with(state, Backend::openmp); }

struct Buffers {
  std::vector<double> a[4];
  std::vector<double> b[4];
  explicit Buffers(std::size_t n) {
    for (int k = 0; k < 4; ++k) {
      a[k].assign(n, 1.0 + 0.1 * k);
      b[k].assign(n, 0.0);
    }
  }
  kernels::Fields in() { return {a[0].data(), a[1].data(), a[2].data(), a[3].data(), a[0].size()}; }
  kernels::Fields out() { return {b[0].data(), b[1].data(), b[2].data(), b[3].data(), b[0].size()}; }
};

template <auto Kernel>
void BM_Transport(benchmark::State& state) {
  Buffers buf(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    Kernel(buf.in(), buf.out(), 0.99);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <auto Kernel>
void BM_React(benchmark::State& state) {
  const ModelParams m = hopf_model();
  Buffers buf(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    Kernel(buf.in(), 1e-4, 1, ReactionScheme::euler, m);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_StepSerial)->RangeMultiplier(4)->Range(1 << 10, 1 << 18);
BENCHMARK(BM_StepOpenMP)->RangeMultiplier(4)->Range(1 << 10, 1 << 18);
BENCHMARK(BM_Transport<ripple::kernels::transport_serial>)->Range(1 << 12, 1 << 18);
BENCHMARK(BM_Transport<ripple::kernels::transport_omp>)->Range(1 << 12, 1 << 18);
BENCHMARK(BM_React<ripple::kernels::react_serial>)->Range(1 << 12, 1 << 18);
BENCHMARK(BM_React<ripple::kernels::react_omp>)->Range(1 << 12, 1 << 18);

BENCHMARK_MAIN();
