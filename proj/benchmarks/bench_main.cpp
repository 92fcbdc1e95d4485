#include "cmipdual/dirichlet.hpp"
#include "cmipdual/dual.hpp"
#include "cmipdual/examples.hpp"
#include "cmipdual/ipm.hpp"
#include "cmipdual/mip.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace cmipdual;

// Box enumeration on the PSD example, box [-n, n]^2.
static void BM_SolveMipPsd(benchmark::State& state)
{
    const auto inst = psd_example();
    const auto box = IntegerBox::uniform(2, -state.range(0), state.range(0));
    MipOptions opts;
    opts.probe_boundary = false;
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_mip(inst, box, opts));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(box.cardinality()));
}
BENCHMARK(BM_SolveMipPsd)->Arg(5)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

// Interior-point solve of max t s.t. M - t I PSD for the n x n tridiagonal M.
static void BM_IpmPsdMargin(benchmark::State& state)
{
    const auto n = state.range(0);
    Matrix M = 2.0 * Matrix::Identity(n, n);
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        M(i, i + 1) = M(i + 1, i) = 1.0;
    }
    const auto k = static_cast<Eigen::Index>(triangle_dim(static_cast<std::size_t>(n)));
    Matrix G(k, 1);
    G.col(0) = -svec(Matrix::Identity(n, n));
    Vector d(1);
    d << -1;
    const auto inst =
        make_instance(Matrix(k, 0), G, -svec(M), Vector(0), d, ConeProduct({ConeBlock::psd(static_cast<std::size_t>(n))}));
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_continuous(inst));
    }
}
BENCHMARK(BM_IpmPsdMargin)->Arg(3)->Arg(6)->Arg(10)->Unit(benchmark::kMicrosecond);

static void BM_CheckDualFeasible(benchmark::State& state)
{
    const auto inst = lorentz_example();
    for (auto _ : state) {
        benchmark::DoNotOptimize(check_dual_feasible(inst));
    }
}
BENCHMARK(BM_CheckDualFeasible)->Unit(benchmark::kMicrosecond);

// Half-line search along (1, sqrt 2) with shrinking eps.
static void BM_ApproximateHalfline(benchmark::State& state)
{
    const auto Z2 = MixedLattice::standard(2, 0);
    Vector z = Vector::Zero(2);
    Vector r(2);
    r << 1, std::sqrt(2.0);
    const HalfLineQuery q{z, r, 1.0 / static_cast<double>(state.range(0)), 5.0};
    for (auto _ : state) {
        benchmark::DoNotOptimize(approximate_halfline(Z2, q, 400));
    }
}
BENCHMARK(BM_ApproximateHalfline)->Arg(10)->Arg(100)->Arg(1000)->Unit(benchmark::kMicrosecond);

static void BM_ValueFunctionCut(benchmark::State& state)
{
    const auto inst = halving_example();
    const auto box = IntegerBox::uniform(1, -20, 20);
    for (auto _ : state) {
        const auto F = DualFunction::value_fn(inst, box);
        benchmark::DoNotOptimize(generate_cut(F, inst));
    }
}
BENCHMARK(BM_ValueFunctionCut)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
