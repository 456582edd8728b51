#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sfd/criteria.hpp"
#include "sfd/design.hpp"
#include "sfd/rng.hpp"

namespace sfd {

/// The Latin-hypercube-preserving neighborhood move: swap two entries within
/// one column. Rows and column are 0-based.
struct ExchangeMove {
    int column = 0;
    int row_i = 0;
    int row_j = 0;
};

/// Returns a copy of `lh` with levels (and jitter, so realized coordinates
/// swap with them) exchanged at rows i and j of the given column. Throws
/// std::invalid_argument when i == j or an index is out of range.
LatinHypercube exchange_move(const LatinHypercube& lh, int column, int row_i, int row_j);

enum class SearchMode { SimulatedAnnealing, ThresholdAccepting };

struct AnnealSchedule {
    /// Unset: calibrated so the median worsening probe move is accepted with
    /// probability 1/2.
    std::optional<double> initial_temperature;
    double cooling_factor = 0.95;
    /// 0 means the default of 10 * n.
    int moves_per_temperature = 0;
    long long max_total_moves = 100000;
    SearchMode mode = SearchMode::SimulatedAnnealing;
    double threshold_decay = 0.9;
    /// Unset: 0.1 * |initial criterion value| (threshold accepting only).
    std::optional<double> initial_threshold;
};

struct TraceEntry {
    long long move = 0;
    double value = 0.0;
};

struct SearchResult {
    LatinHypercube best_design;
    double best_value = 0.0;
    double initial_value = 0.0;
    std::vector<TraceEntry> trace;  // accepted moves only
    long long moves_evaluated = 0;
    RngSeed seed;
};

/// Incremental criterion state for exchange moves. A cache owns the current
/// realized design; `value_after` prices a move without committing it, and
/// `commit` applies the most recently priced move. After roughly 4k commits
/// the state is recomputed from scratch to stop floating-point drift.
class CriterionCache {
public:
    virtual ~CriterionCache() = default;

    const Design& design() const noexcept { return design_; }
    virtual double value() const = 0;
    virtual double value_after(const ExchangeMove& move) = 0;
    void commit(const ExchangeMove& move);
    virtual void rebuild() = 0;

protected:
    explicit CriterionCache(Design design) : design_(std::move(design)) {}
    virtual void apply(const ExchangeMove& move) = 0;
    void swap_entries(const ExchangeMove& move);
    void note_priced(const ExchangeMove& move) { last_priced_ = move; }

    Design design_;
    std::optional<ExchangeMove> last_priced_;
    long long commits_ = 0;
    bool pending_rebuild_ = false;
};

/// Builds the incremental evaluator for `spec`. Criteria without a dedicated
/// delta rule fall back to full re-evaluation per move. Throws
/// DegenerateDesignError when the criterion is degenerate on the design.
std::unique_ptr<CriterionCache> make_criterion_cache(const Design& design,
                                                     const CriterionSpec& spec);

/// Value of `spec` after applying `move` to `lh`, priced through `cache`
/// without mutating it. Throws std::logic_error when the cache does not
/// match the realization of `lh`.
double incremental_value(const LatinHypercube& lh, const CriterionSpec& spec,
                         CriterionCache& cache, const ExchangeMove& move);

/// The production acceptance rule, exposed for statistical testing:
/// simulated annealing accepts a worsening move with probability
/// exp(-delta/temperature); threshold accepting accepts any move whose
/// worsening is below the threshold.
bool search_accept(SearchMode mode, double delta, double temperature_or_threshold, Rng& rng);

/// Stochastic column-exchange search over Latin hypercubes. Deterministic
/// given the seed; every visited state is a valid Latin hypercube; the
/// returned best value is re-evaluated from scratch. Maximization criteria
/// are negated internally so the chain always minimizes.
SearchResult anneal(const LatinHypercube& initial, const CriterionSpec& spec,
                    const AnnealSchedule& schedule, RngSeed seed);

/// Best of `restarts` independent anneal runs from fresh random Latin
/// hypercubes, each on the derived sub-stream split(r). Restarts run
/// concurrently on up to `threads` workers (0 = hardware concurrency);
/// results merge deterministically by restart index.
SearchResult multi_restart(int n, int d, const CriterionSpec& spec, int restarts,
                           const AnnealSchedule& schedule, RngSeed seed, int threads = 0);

std::string search_result_to_json(const SearchResult& result, const CriterionSpec& spec);

/// CSV trace: `move,value,accepted`, starting with the initial state at move 0.
void write_trace_csv(std::ostream& out, const SearchResult& result);

}  // namespace sfd
