#include "sfd/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "sfd/csv.hpp"
#include "sfd/errors.hpp"
#include "parallel_util.hpp"

namespace sfd {

LatinHypercube exchange_move(const LatinHypercube& lh, int column, int row_i, int row_j) {
    if (column < 0 || column >= lh.d()) throw std::invalid_argument("exchange_move: column out of range");
    if (row_i < 0 || row_i >= lh.n() || row_j < 0 || row_j >= lh.n())
        throw std::invalid_argument("exchange_move: row out of range");
    if (row_i == row_j) throw std::invalid_argument("exchange_move: rows must differ");
    LatinHypercube out = lh;
    std::swap(out.levels(row_i, column), out.levels(row_j, column));
    std::swap(out.jitter(row_i, column), out.jitter(row_j, column));
    return out;
}

double incremental_value(const LatinHypercube& lh, const CriterionSpec& spec,
                         CriterionCache& cache, const ExchangeMove& move) {
    (void)spec;
    const Design current = realize(lh);
    if (current.points.rows() != cache.design().points.rows() ||
        current.points.cols() != cache.design().points.cols() ||
        current.points != cache.design().points)
        throw std::logic_error("incremental_value: cache is stale for this Latin hypercube");
    return cache.value_after(move);
}

bool search_accept(SearchMode mode, double delta, double temperature_or_threshold, Rng& rng) {
    if (mode == SearchMode::ThresholdAccepting) return delta < temperature_or_threshold;
    if (delta <= 0.0) return true;
    return rng.uniform01() < std::exp(-delta / temperature_or_threshold);
}

namespace {

void check_schedule(const AnnealSchedule& schedule) {
    if (schedule.initial_temperature && *schedule.initial_temperature <= 0.0)
        throw std::invalid_argument("anneal: initial_temperature must be > 0");
    if (schedule.cooling_factor <= 0.0 || schedule.cooling_factor >= 1.0)
        throw std::invalid_argument("anneal: cooling_factor must lie in (0,1)");
    if (schedule.threshold_decay <= 0.0 || schedule.threshold_decay >= 1.0)
        throw std::invalid_argument("anneal: threshold_decay must lie in (0,1)");
    if (schedule.moves_per_temperature < 0)
        throw std::invalid_argument("anneal: moves_per_temperature must be >= 0");
    if (schedule.max_total_moves < 0)
        throw std::invalid_argument("anneal: max_total_moves must be >= 0");
}

ExchangeMove random_move(Rng& rng, int n, int d) {
    ExchangeMove move;
    move.column = static_cast<int>(rng.below(static_cast<std::uint64_t>(d)));
    move.row_i = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    move.row_j = static_cast<int>(rng.below(static_cast<std::uint64_t>(n - 1)));
    if (move.row_j >= move.row_i) ++move.row_j;
    return move;
}

// Temperature at which the median worsening probe move is accepted with
// probability 1/2.
double calibrate_temperature(CriterionCache& cache, double sign, double current, Rng& rng, int n,
                             int d) {
    std::vector<double> worsenings;
    for (int t = 0; t < 100; ++t) {
        const ExchangeMove move = random_move(rng, n, d);
        const double candidate = sign * cache.value_after(move);
        if (std::isfinite(candidate) && candidate > current) worsenings.push_back(candidate - current);
    }
    if (worsenings.empty()) return std::max(std::abs(current), 1.0) * 0.1;
    const auto mid = worsenings.begin() + static_cast<std::ptrdiff_t>(worsenings.size() / 2);
    std::nth_element(worsenings.begin(), mid, worsenings.end());
    const double median = *mid;
    if (!(median > 0.0)) return std::max(std::abs(current), 1.0) * 0.1;
    return median / std::log(2.0);
}

}  // namespace

SearchResult anneal(const LatinHypercube& initial, const CriterionSpec& spec,
                    const AnnealSchedule& schedule, RngSeed seed) {
    check_schedule(schedule);
    const int n = initial.n();
    const int d = initial.d();
    if (n < 2 || d < 1) throw std::invalid_argument("anneal: need n >= 2 and d >= 1");

    auto cache = make_criterion_cache(realize(initial), spec);
    const double sign = spec.direction == Direction::Maximize ? -1.0 : 1.0;
    double current = sign * cache->value();
    if (!std::isfinite(current))
        throw DegenerateDesignError("anneal: criterion is not finite on the initial design");

    SearchResult result;
    result.seed = seed;
    result.initial_value = sign * current;

    LatinHypercube lh = initial;
    LatinHypercube best_lh = initial;
    double best = current;

    Rng rng(seed);
    double temperature = 1.0;
    double threshold = 0.0;
    if (schedule.mode == SearchMode::SimulatedAnnealing) {
        temperature = schedule.initial_temperature
                          ? *schedule.initial_temperature
                          : calibrate_temperature(*cache, sign, current, rng, n, d);
    } else {
        threshold = schedule.initial_threshold ? *schedule.initial_threshold
                                               : 0.1 * std::abs(current);
    }

    const int moves_per_temperature =
        schedule.moves_per_temperature > 0 ? schedule.moves_per_temperature : 10 * n;
    long long moves = 0;
    while (moves < schedule.max_total_moves) {
        for (int step = 0; step < moves_per_temperature && moves < schedule.max_total_moves;
             ++step) {
            const ExchangeMove move = random_move(rng, n, d);
            const double raw = cache->value_after(move);
            const double candidate = sign * raw;
            ++moves;
            bool accepted = false;
            if (std::isfinite(candidate)) {
                const double delta = candidate - current;
                const double control = schedule.mode == SearchMode::SimulatedAnnealing
                                           ? temperature
                                           : threshold;
                accepted = search_accept(schedule.mode, delta, control, rng);
            }
            if (!accepted) continue;
            cache->commit(move);
            std::swap(lh.levels(move.row_i, move.column), lh.levels(move.row_j, move.column));
            std::swap(lh.jitter(move.row_i, move.column), lh.jitter(move.row_j, move.column));
            current = sign * cache->value();
            result.trace.push_back({moves, sign * current});
            if (current < best) {
                best = current;
                best_lh = lh;
            }
        }
        temperature *= schedule.cooling_factor;
        threshold *= schedule.threshold_decay;
    }

    result.moves_evaluated = moves;
    result.best_design = std::move(best_lh);
    result.best_value = evaluate(realize(result.best_design), spec);
    return result;
}

SearchResult multi_restart(int n, int d, const CriterionSpec& spec, int restarts,
                           const AnnealSchedule& schedule, RngSeed seed, int threads) {
    if (restarts < 1) throw std::invalid_argument("multi_restart: restarts must be >= 1");

    const Rng base(seed);
    std::vector<SearchResult> results(static_cast<std::size_t>(restarts));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(restarts));
    detail::parallel_for(restarts, threads, [&](int r) {
        try {
            const Rng stream = base.split(static_cast<std::uint64_t>(r));
            const RngSeed init_seed{stream.split(0).seed_value()};
            const RngSeed anneal_seed{stream.split(1).seed_value()};
            const LatinHypercube initial = random_latin_hypercube(n, d, init_seed);
            results[static_cast<std::size_t>(r)] = anneal(initial, spec, schedule, anneal_seed);
        } catch (...) {
            errors[static_cast<std::size_t>(r)] = std::current_exception();
        }
    });
    for (const auto& error : errors)
        if (error) std::rethrow_exception(error);

    const bool maximize = spec.direction == Direction::Maximize;
    std::size_t best = 0;
    long long total_moves = 0;
    for (std::size_t r = 0; r < results.size(); ++r) {
        total_moves += results[r].moves_evaluated;
        const double v = results[r].best_value;
        const double b = results[best].best_value;
        if (maximize ? v > b : v < b) best = r;
    }
    SearchResult out = std::move(results[best]);
    out.seed = seed;
    out.moves_evaluated = total_moves;
    return out;
}

std::string search_result_to_json(const SearchResult& result, const CriterionSpec& spec) {
    nlohmann::json j;
    j["criterion"] = criterion_name(spec.kind);
    j["direction"] = spec.direction == Direction::Maximize ? "maximize" : "minimize";
    j["n"] = result.best_design.n();
    j["d"] = result.best_design.d();
    j["seed"] = result.seed.value;
    j["initial_value"] = result.initial_value;
    j["best_value"] = result.best_value;
    j["moves_evaluated"] = result.moves_evaluated;
    j["accepted_moves"] = result.trace.size();
    return j.dump();
}

void write_trace_csv(std::ostream& out, const SearchResult& result) {
    out << "move,value,accepted\n";
    out << "0," << format_double(result.initial_value) << ",0\n";
    for (const auto& entry : result.trace)
        out << entry.move << "," << format_double(entry.value) << ",1\n";
}

}  // namespace sfd
