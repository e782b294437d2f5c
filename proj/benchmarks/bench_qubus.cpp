#include <array>
#include <cmath>
#include <numbers>

#include <benchmark/benchmark.h>

#include "qubus/expm.hpp"
#include "qubus/qubus.hpp"

using namespace qubus;

namespace {

const double kD = std::sqrt(std::numbers::pi / 8.0);
const std::array<Complex, 4> kUniform{0.5, 0.5, 0.5, 0.5};

void BM_Compose(benchmark::State& state) {
  BusOp a{0.1, {0.3, -0.2}, 0.4};
  const BusOp b{-0.2, {0.1, 0.5}, -0.3};
  for (auto _ : state) {
    a = compose(a, b);
    benchmark::DoNotOptimize(a);
  }
}
BENCHMARK(BM_Compose);

void BM_Expm(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Eigen::MatrixXcd a = fock::annihilation(n);
  const Complex beta(0.8, 0.3);
  const Eigen::MatrixXcd gen = beta * a.adjoint() - std::conj(beta) * a;
  for (auto _ : state) benchmark::DoNotOptimize(expm(gen));
}
BENCHMARK(BM_Expm)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_ExactGate(benchmark::State& state) {
  const auto gate = build_two_qubit_gate_for(kD, kD, std::numbers::pi / 2.0, std::numbers::pi / 2.0);
  const auto input = init_state(kUniform, 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(run_exact(gate.sequence, input));
}
BENCHMARK(BM_ExactGate);

void BM_FockGate(benchmark::State& state) {
  const auto gate = build_two_qubit_gate_for(kD, kD, std::numbers::pi / 2.0, std::numbers::pi / 2.0);
  const auto input = fock::from_hybrid(init_state(kUniform, 0.0), static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fock::evolve(gate.sequence, input));
}
BENCHMARK(BM_FockGate)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_SolveSchedule(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(solve_eight_op_schedule(std::numbers::pi / 4.0, 1.0, 10.0));
}
BENCHMARK(BM_SolveSchedule)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
