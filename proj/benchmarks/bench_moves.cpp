// Per-move pricing cost of the incremental evaluators; this is what
// separates the cheap projection criteria from MaxPro in design-production
// wall time.

#include <benchmark/benchmark.h>

#include "sfd/criteria.hpp"
#include "sfd/optimize.hpp"

namespace {

void run_moves(benchmark::State& state, const sfd::CriterionSpec& spec) {
    const int n = static_cast<int>(state.range(0));
    const auto design = sfd::realize(sfd::random_latin_hypercube(n, 6, sfd::RngSeed{7}));
    auto cache = sfd::make_criterion_cache(design, spec);
    sfd::Rng rng(sfd::RngSeed{11});
    for (auto _ : state) {
        sfd::ExchangeMove move;
        move.column = static_cast<int>(rng.below(6));
        move.row_i = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
        move.row_j = static_cast<int>(rng.below(static_cast<std::uint64_t>(n - 1)));
        if (move.row_j >= move.row_i) ++move.row_j;
        benchmark::DoNotOptimize(cache->value_after(move));
        cache->commit(move);
    }
}

void BM_move_phi_p(benchmark::State& state) { run_moves(state, sfd::CriterionSpec::phi_p(2, 50)); }
void BM_move_maxpro(benchmark::State& state) { run_moves(state, sfd::CriterionSpec::maxpro()); }
void BM_move_ard(benchmark::State& state) { run_moves(state, sfd::CriterionSpec::ard({2}, 1.0)); }
void BM_move_up(benchmark::State& state) {
    run_moves(state, sfd::CriterionSpec::uniform_projection());
}
void BM_move_min_distance(benchmark::State& state) {
    run_moves(state, sfd::CriterionSpec::min_distance(2));
}

BENCHMARK(BM_move_phi_p)->Arg(50)->Arg(100)->Arg(200);
BENCHMARK(BM_move_maxpro)->Arg(50)->Arg(100)->Arg(200);
BENCHMARK(BM_move_ard)->Arg(50)->Arg(100)->Arg(200);
BENCHMARK(BM_move_up)->Arg(50)->Arg(100)->Arg(200);
BENCHMARK(BM_move_min_distance)->Arg(50)->Arg(100);

}  // namespace
