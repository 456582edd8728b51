#include <benchmark/benchmark.h>

#include "sfd/criteria.hpp"
#include "sfd/design.hpp"

namespace {

sfd::Design make_design(int n, int d) {
    return sfd::realize(sfd::random_latin_hypercube(n, d, sfd::RngSeed{42}));
}

void BM_phi_p(benchmark::State& state) {
    const auto design = make_design(static_cast<int>(state.range(0)), 6);
    for (auto _ : state) benchmark::DoNotOptimize(sfd::phi_p(design, 2, 50));
}
BENCHMARK(BM_phi_p)->Arg(50)->Arg(100)->Arg(200);

void BM_maxpro(benchmark::State& state) {
    const auto design = make_design(static_cast<int>(state.range(0)), 6);
    for (auto _ : state) benchmark::DoNotOptimize(sfd::maxpro(design));
}
BENCHMARK(BM_maxpro)->Arg(50)->Arg(100)->Arg(200);

void BM_ard(benchmark::State& state) {
    const auto design = make_design(static_cast<int>(state.range(0)), 6);
    for (auto _ : state) benchmark::DoNotOptimize(sfd::ard(design, {2}, 1.0));
}
BENCHMARK(BM_ard)->Arg(50)->Arg(100)->Arg(200);

void BM_uniform_projection(benchmark::State& state) {
    const auto design = make_design(static_cast<int>(state.range(0)), 6);
    const auto levels = sfd::discrepancy_levels(design, design.n());
    for (auto _ : state)
        benchmark::DoNotOptimize(sfd::uniform_projection(levels, design.n()));
}
BENCHMARK(BM_uniform_projection)->Arg(50)->Arg(100)->Arg(200);

void BM_star_discrepancy_exact(benchmark::State& state) {
    const auto design = make_design(static_cast<int>(state.range(0)), 2);
    for (auto _ : state)
        benchmark::DoNotOptimize(sfd::star_discrepancy(design, sfd::StarMethod::Exact));
}
BENCHMARK(BM_star_discrepancy_exact)->Arg(32)->Arg(64);

}  // namespace
