#include <benchmark/benchmark.h>

#include "wavehf/energy.hpp"
#include "wavehf/groundstate.hpp"
#include "wavehf/meanfield.hpp"
#include "wavehf/norms.hpp"
#include "wavehf/propagator.hpp"
#include "wavehf/random.hpp"

using namespace wavehf;

namespace {

System make(int n) {
    return make_system(Grid::build(1, n, 10.0), {Nucleus{{0.0, 0.0, 0.0}, 2}}, 0.5);
}

KernelOperator state(const System& system) {
    return random_feasible(system.grid, 2, 7);
}

void BM_DuhamelStep(benchmark::State& s) {
    const System system = make(static_cast<int>(s.range(0)));
    const FreePropagator free(system);
    StepperConfig config;
    config.exchange = s.range(1) != 0;
    const Stepper stepper(system, free, config);
    const KernelOperator w = state(system);
    for (auto _ : s) {
        benchmark::DoNotOptimize(stepper.step(w, 0.0));
    }
}
BENCHMARK(BM_DuhamelStep)->ArgsProduct({{32, 64, 128}, {0, 1}})->Unit(benchmark::kMicrosecond);

void BM_Rk4Step(benchmark::State& s) {
    const System system = make(static_cast<int>(s.range(0)));
    const FreePropagator free(system);
    StepperConfig config;
    config.scheme = Scheme::rk4;
    const Stepper stepper(system, free, config);
    const KernelOperator w = state(system);
    for (auto _ : s) {
        benchmark::DoNotOptimize(stepper.step(w, 0.0));
    }
}
BENCHMARK(BM_Rk4Step)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMicrosecond);

void BM_Energy(benchmark::State& s) {
    const System system = make(static_cast<int>(s.range(0)));
    const KernelOperator w = state(system);
    for (auto _ : s) {
        benchmark::DoNotOptimize(energy(system, w, EnergyMode::full));
    }
}
BENCHMARK(BM_Energy)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMicrosecond);

void BM_Gradient(benchmark::State& s) {
    const System system = make(static_cast<int>(s.range(0)));
    const KernelOperator w = state(system);
    const EnergyMode mode = s.range(1) != 0 ? EnergyMode::full : EnergyMode::reduced;
    for (auto _ : s) {
        benchmark::DoNotOptimize(gradient(system, w, mode));
    }
}
BENCHMARK(BM_Gradient)->ArgsProduct({{32, 64, 128}, {0, 1}})->Unit(benchmark::kMicrosecond);

void BM_ProjectFeasible(benchmark::State& s) {
    const System system = make(static_cast<int>(s.range(0)));
    Rng rng(3);
    const KernelOperator w = random_kernel(system.grid, rng, 2.0);
    for (auto _ : s) {
        benchmark::DoNotOptimize(project_feasible(w, 2));
    }
}
BENCHMARK(BM_ProjectFeasible)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMicrosecond);

void BM_OperatorNorm(benchmark::State& s) {
    const System system = make(static_cast<int>(s.range(0)));
    const KernelOperator w = state(system);
    for (auto _ : s) {
        benchmark::DoNotOptimize(operator_norm(w));
    }
}
BENCHMARK(BM_OperatorNorm)->Arg(64)->Unit(benchmark::kMicrosecond);

void BM_Scf(benchmark::State& s) {
    const System system = make(static_cast<int>(s.range(0)));
    ScfConfig config;
    config.electron_count = 2;
    for (auto _ : s) {
        benchmark::DoNotOptimize(scf_ground_state(system, config));
    }
}
BENCHMARK(BM_Scf)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
