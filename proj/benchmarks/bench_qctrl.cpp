// Micro-benchmarks for the hot paths: slice propagation, Lindblad
// integration, Lie-algebra closure and adjoint gradients.

#include <random>

#include <benchmark/benchmark.h>

#include "qctrl/controllability.hpp"
#include "qctrl/grape.hpp"

namespace {

using namespace qctrl;

Matrix random_hermitian(Eigen::Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix a(n, n);
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < n; ++c)
            a(r, c) = Complex(g(rng), g(rng));
    return 0.5 * (a + a.adjoint().eval());
}

ControlSystem make_system(Eigen::Index n, std::size_t controls, std::mt19937_64& rng) {
    std::vector<HermitianOperator> ops;
    for (std::size_t m = 0; m < controls; ++m)
        ops.emplace_back(random_hermitian(n, rng));
    return ControlSystem(HermitianOperator(random_hermitian(n, rng)), std::move(ops));
}

PulseSchedule make_schedule(Eigen::Index slices, Eigen::Index fields,
                            std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::MatrixXd values(slices, fields);
    for (Eigen::Index k = 0; k < slices; ++k)
        for (Eigen::Index m = 0; m < fields; ++m)
            values(k, m) = u(rng);
    return PulseSchedule(0.0, 0.05, std::move(values));
}

void bm_total_propagator(benchmark::State& state) {
    std::mt19937_64 rng(1);
    const Eigen::Index n = state.range(0);
    const ControlSystem sys = make_system(n, 2, rng);
    const PulseSchedule sched = make_schedule(64, 2, rng);
    for (auto _ : state)
        benchmark::DoNotOptimize(total_propagator(sys, sched));
}
BENCHMARK(bm_total_propagator)->Arg(2)->Arg(4)->Arg(8);

void bm_propagate_open(benchmark::State& state) {
    std::mt19937_64 rng(2);
    const Eigen::Index n = state.range(0);
    const ControlSystem sys = make_system(n, 1, rng);
    const PulseSchedule sched = make_schedule(32, 1, rng);
    Matrix lower = Matrix::Zero(n, n);
    lower(0, n - 1) = 1.0;
    const DensityOperator rho0 = pure_state_density(Ket::basis_state(n, n - 1));
    for (auto _ : state)
        benchmark::DoNotOptimize(
            propagate_open(sys, sched, {{lower, 0.3}}, rho0, 10, 32));
}
BENCHMARK(bm_propagate_open)->Arg(2)->Arg(4);

void bm_lie_closure(benchmark::State& state) {
    std::mt19937_64 rng(3);
    const Eigen::Index n = state.range(0);
    const ControlSystem sys = make_system(n, 2, rng);
    for (auto _ : state)
        benchmark::DoNotOptimize(generate_lie_algebra(sys));
}
BENCHMARK(bm_lie_closure)->Arg(2)->Arg(3)->Arg(4);

void bm_gradient(benchmark::State& state) {
    std::mt19937_64 rng(4);
    const Eigen::Index n = state.range(0);
    const ControlSystem sys = make_system(n, 2, rng);
    const PulseSchedule sched = make_schedule(32, 2, rng);
    const ObjectiveSpec obj = observable_objective(
        HermitianOperator(random_hermitian(n, rng)),
        pure_state_density(Ket::basis_state(n, 0)), Eigen::VectorXd::Constant(2, 1e-4));
    for (auto _ : state)
        benchmark::DoNotOptimize(gradient(sys, sched, obj));
}
BENCHMARK(bm_gradient)->Arg(2)->Arg(4);

} // namespace
