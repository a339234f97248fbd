#include <benchmark/benchmark.h>

#include "sqc/circuit.hpp"
#include "sqc/dynamics.hpp"
#include "sqc/operators.hpp"
#include "sqc/pulse.hpp"
#include "sqc/spectrum.hpp"

namespace {

sqc::CircuitParams nominal_params() {
    return {11.5, 20.0, 77.5, 69.2, 0.40, 0.40, 0.78, 0.78};
}

void bm_assemble(benchmark::State& state) {
    const sqc::HamiltonianSpec spec =
        sqc::compile_two_qubit(nominal_params(), sqc::FluxBias::operating(0.3));
    for (auto _ : state)
        benchmark::DoNotOptimize(sqc::assemble_hamiltonian(spec, 10));
}
BENCHMARK(bm_assemble)->Unit(benchmark::kMillisecond);

void bm_solve_point(benchmark::State& state) {
    const sqc::CircuitParams p = nominal_params();
    for (auto _ : state)
        benchmark::DoNotOptimize(sqc::zz_at(p, 0.3));
}
BENCHMARK(bm_solve_point)->Unit(benchmark::kMillisecond);

void bm_hierarchical_point(benchmark::State& state) {
    const sqc::CircuitParams p = nominal_params();
    sqc::SolveOptions opts;
    opts.method = 2;
    for (auto _ : state)
        benchmark::DoNotOptimize(sqc::zz_at(p, 0.3, opts));
}
BENCHMARK(bm_hierarchical_point)->Unit(benchmark::kMillisecond);

void bm_propagation_ns(benchmark::State& state) {
    const sqc::CircuitParams p = nominal_params();
    sqc::Waveform wf;
    wf.dt = 0.01;
    wf.samples.assign(101, 0.5156);
    sqc::PropagateOptions opts;
    for (auto _ : state)
        benchmark::DoNotOptimize(sqc::propagate_unitary(p, wf, opts));
}
BENCHMARK(bm_propagation_ns)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
