#include <benchmark/benchmark.h>

#include "sfd/gp.hpp"
#include "sfd/testbed.hpp"

namespace {

void BM_gp_fit_friedman(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto design = sfd::realize(sfd::random_latin_hypercube(n, 5, sfd::RngSeed{3}));
    const Eigen::VectorXd y = sfd::eval_simulator("friedman", design);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sfd::fit(design, y, sfd::KernelFamily::Matern32));
    }
}
BENCHMARK(BM_gp_fit_friedman)->Arg(30)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_gp_predict(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto design = sfd::realize(sfd::random_latin_hypercube(n, 5, sfd::RngSeed{3}));
    const Eigen::VectorXd y = sfd::eval_simulator("friedman", design);
    const auto model = sfd::fit(design, y, sfd::KernelFamily::Matern32);
    const auto queries = sfd::realize(sfd::random_latin_hypercube(1000, 5, sfd::RngSeed{9}));
    for (auto _ : state) benchmark::DoNotOptimize(sfd::predict_mean(model, queries));
}
BENCHMARK(BM_gp_predict)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace
