// bench_main.cpp - timings for the generator, concurrence and analytic kernels

#include <random>

#include <benchmark/benchmark.h>

#include "qdent/analytic.hpp"
#include "qdent/dynamics.hpp"
#include "qdent/entanglement.hpp"

using namespace qdent;

namespace {

DenseMatrix random_density(Eigen::Index dim)
{
    std::mt19937 rng(1);
    std::normal_distribution<double> n;
    DenseMatrix a(dim, dim);
    for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = cplx(n(rng), n(rng));
    DenseMatrix rho = a * a.adjoint();
    return rho / rho.trace();
}

// Driven two- and three-QD generator at the pulse peak, plasmon levels as the argument.
void BM_MasterEquationApply(benchmark::State& state)
{
    const auto n_qd = static_cast<std::size_t>(state.range(0));
    const int levels = static_cast<int>(state.range(1));
    const SystemSpec spec = make_system(std::vector<double>(n_qd, 15.0), 150.0, 2.0, levels, 1.9e-4);
    PulseSpec pulse;
    pulse.fluence_njcm2 = 250.0;
    const Model model(spec, pulse.carrier_mev);
    const MasterEquation eq(model, pulse);
    const DenseMatrix rho = random_density(static_cast<Eigen::Index>(model.basis.size()));
    DenseMatrix out(rho.rows(), rho.cols());
    for (auto _ : state) {
        eq.apply(pulse.center(), rho, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetLabel("M=" + std::to_string(model.basis.size()));
}
BENCHMARK(BM_MasterEquationApply)->Args({2, 3})->Args({2, 10})->Args({2, 25})->Args({3, 10});

void BM_DarkPropagation(benchmark::State& state)
{
    const SystemSpec spec = make_system({12.5, 25.0}, 100.0, 0.0, 3);
    const Model model(spec);
    const DenseMatrix rho0 = initial_state(InitialState::single_qd_excited(0), spec);
    IntegratorConfig cfg;
    cfg.t_end_fs = 500.0;
    for (auto _ : state) benchmark::DoNotOptimize(propagate(rho0, model, std::nullopt, cfg).times.size());
}
BENCHMARK(BM_DarkPropagation)->Unit(benchmark::kMillisecond);

void BM_Concurrence(benchmark::State& state)
{
    const DenseMatrix rho = random_density(4);
    const ReducedDM r = rho;
    for (auto _ : state) benchmark::DoNotOptimize(concurrence(r));
}
BENCHMARK(BM_Concurrence);

void BM_PairwiseConcurrences(benchmark::State& state)
{
    const BasisMap basis(static_cast<std::size_t>(state.range(0)), 5);
    const DenseMatrix rho = random_density(static_cast<Eigen::Index>(basis.size()));
    for (auto _ : state) benchmark::DoNotOptimize(pairwise_concurrences(rho, basis).sum());
}
BENCHMARK(BM_PairwiseConcurrences)->Arg(2)->Arg(3)->Arg(4);

void BM_DarkBuild(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto g = common_ratio_couplings(n, 0.3, 10.0);
    for (auto _ : state) benchmark::DoNotOptimize(ndark_build(g, 100.0).w.size());
}
BENCHMARK(BM_DarkBuild)->Arg(3)->Arg(20)->Arg(150);

void BM_OptimalRatio(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(ndark_optimal_ratio(n).x_star);
}
BENCHMARK(BM_OptimalRatio)->Arg(3)->Arg(20)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
