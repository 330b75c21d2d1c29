// Serial vs OpenMP timings for the kernels with an Execution switch.

#include <benchmark/benchmark.h>

#include "rd/hierarchy.hpp"
#include "rd/operators.hpp"

using namespace rd;

namespace {

Execution mode(const benchmark::State& state) { return state.range(0) ? Execution::parallel : Execution::serial; }

DiffPoly q(long a, long b = 1) { return DiffPoly(ParamExpr(make_rational(a, b))); }

void BM_is_poisson(benchmark::State& state)
{
    const DiffOperator k = DiffOperator::dx() + compose(DiffOperator::multiplication(q(1, 12) * DiffPoly::eps(2)), DiffOperator::dx(3));
    const auto samples = default_poisson_samples(static_cast<int>(state.range(1)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(is_poisson(k, samples, 4, mode(state)).jacobi);
    }
}

void BM_commute_certificate(benchmark::State& state)
{
    const int e = 4;
    const DiffPoly u = DiffPoly::u();
    const LocalFunctional h1 =
        integrate((q(1, 6) * u * u * u - q(1, 24) * DiffPoly::eps(2) * DiffPoly::jet(1) * DiffPoly::jet(1)).with_eps_cap(e));
    const Hierarchy h = special_hierarchy(h1, static_cast<int>(state.range(1)), e);
    for (auto _ : state) {
        benchmark::DoNotOptimize(commute_certificate(h, mode(state)));
    }
}

void BM_extract_constraints(benchmark::State& state)
{
    std::vector<DiffPoly> templates;
    for (long c4 = 1; c4 <= state.range(1); ++c4) {
        templates.push_back(alm_template(6, {{"c2", make_rational(1, 1)}, {"c4", make_rational(c4, 1)}, {"c6", make_rational(0, 1)}}));
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(extract_constraints(templates, 6, mode(state)).size());
    }
}

} // namespace

BENCHMARK(BM_is_poisson)->ArgsProduct({{0, 1}, {4, 5}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_commute_certificate)->ArgsProduct({{0, 1}, {3, 4}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_extract_constraints)->ArgsProduct({{0, 1}, {4}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
