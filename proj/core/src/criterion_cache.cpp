#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "sfd/errors.hpp"
#include "sfd/optimize.hpp"
#include "subsets.hpp"

namespace sfd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr long long kRebuildInterval = 4096;

bool same_move(const ExchangeMove& a, const ExchangeMove& b) {
    return a.column == b.column && a.row_i == b.row_i && a.row_j == b.row_j;
}

double abs_pow(double delta, int q) {
    const double a = std::abs(delta);
    if (q == 1) return a;
    if (q == 2) return a * a;
    return std::pow(a, q);
}

}  // namespace

void CriterionCache::swap_entries(const ExchangeMove& move) {
    std::swap(design_.points(move.row_i, move.column), design_.points(move.row_j, move.column));
}

void CriterionCache::commit(const ExchangeMove& move) {
    if (!last_priced_ || !same_move(*last_priced_, move))
        throw std::logic_error("CriterionCache::commit: move was not the last one priced");
    apply(move);
    swap_entries(move);
    last_priced_.reset();
    if (++commits_ % kRebuildInterval == 0 || pending_rebuild_) {
        rebuild();
        pending_rebuild_ = false;
    }
}

namespace {

// ---------------------------------------------------------------------------
// phi_p: keeps the matrix of q-th-power distances plus a shifted exponential
// sum of the -p*log(d) terms, so a move costs O(n) log/exp operations.
// ---------------------------------------------------------------------------
class PhiPCache final : public CriterionCache {
public:
    PhiPCache(Design design, int q, int p)
        : CriterionCache(std::move(design)), q_(q), p_(p), exponent_(static_cast<double>(p) / q) {
        PhiPCache::rebuild();
    }

    double value() const override { return std::exp((shift_ + std::log(sum_)) / p_); }

    double value_after(const ExchangeMove& move) override {
        note_priced(move);
        scratch_entries_.clear();
        scratch_valid_ = false;
        const int n = design_.n();
        const auto& x = design_.points;
        const int c = move.column;
        const int i = move.row_i;
        const int j = move.row_j;
        const double xi = x(i, c);
        const double xj = x(j, c);

        double delta_sum = 0.0;
        for (int k = 0; k < n; ++k) {
            if (k == i || k == j) continue;
            const double xk = x(k, c);
            for (const auto& [row, other, fresh] :
                 {std::tuple{i, k, xj}, std::tuple{j, k, xi}}) {
                const double stale = row == i ? xi : xj;
                double nd = dqq_(row, other) - abs_pow(stale - xk, q_) + abs_pow(fresh - xk, q_);
                if (nd <= 0.0) nd = recompute_pair(row, other, c, fresh);
                if (nd <= 0.0) return kInf;  // coincident runs: criterion infinite
                const double new_a = -exponent_ * std::log(nd);
                const double old_a = -exponent_ * std::log(dqq_(row, other));
                if (new_a - shift_ > 690.0) {
                    pending_rebuild_ = true;  // the shift is stale; reprice fully
                    return full_price(move);
                }
                delta_sum += std::exp(new_a - shift_) - std::exp(old_a - shift_);
                scratch_entries_.push_back({row, other, nd});
            }
        }
        const double proposed = sum_ + delta_sum;
        if (!(proposed > 0.0) || !std::isfinite(proposed)) {
            pending_rebuild_ = true;
            return full_price(move);
        }
        scratch_sum_ = proposed;
        scratch_valid_ = true;
        return std::exp((shift_ + std::log(proposed)) / p_);
    }

    void rebuild() override {
        const int n = design_.n();
        dqq_.resize(n, n);
        dqq_.setZero();
        double max_a = -kInf;
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                double s = 0.0;
                for (int l = 0; l < design_.d(); ++l)
                    s += abs_pow(design_.points(i, l) - design_.points(j, l), q_);
                if (s <= 0.0) throw DegenerateDesignError("phi_p: coincident runs");
                dqq_(i, j) = dqq_(j, i) = s;
                max_a = std::max(max_a, -exponent_ * std::log(s));
            }
        }
        shift_ = max_a;
        sum_ = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                sum_ += std::exp(-exponent_ * std::log(dqq_(i, j)) - shift_);
    }

protected:
    void apply(const ExchangeMove&) override {
        if (!scratch_valid_) {
            pending_rebuild_ = true;  // priced by full evaluation or degenerate
            return;
        }
        for (const auto& [row, other, nd] : scratch_entries_) dqq_(row, other) = dqq_(other, row) = nd;
        sum_ = scratch_sum_;
        if (sum_ < 1e-250 || sum_ > 1e250) pending_rebuild_ = true;
    }

private:
    double recompute_pair(int row, int other, int swapped_col, double fresh) const {
        double s = 0.0;
        for (int l = 0; l < design_.d(); ++l) {
            const double a = l == swapped_col ? fresh : design_.points(row, l);
            s += abs_pow(a - design_.points(other, l), q_);
        }
        return s;
    }

    double full_price(const ExchangeMove& move) {
        swap_entries(move);
        double v;
        try {
            v = phi_p(design_, q_, p_);
        } catch (const DegenerateDesignError&) {
            v = kInf;
        }
        swap_entries(move);
        return v;
    }

    int q_;
    int p_;
    double exponent_;
    Eigen::MatrixXd dqq_;
    double shift_ = 0.0;
    double sum_ = 0.0;
    std::vector<std::tuple<int, int, double>> scratch_entries_;
    double scratch_sum_ = 0.0;
    bool scratch_valid_ = false;
};

// ---------------------------------------------------------------------------
// Separation distance: q-th-power distances in a multiset so the minimum
// survives O(n log n) updates per move.
// ---------------------------------------------------------------------------
class MinDistCache final : public CriterionCache {
public:
    MinDistCache(Design design, int q) : CriterionCache(std::move(design)), q_(q) {
        MinDistCache::rebuild();
    }

    double value() const override { return root(*values_.begin()); }

    double value_after(const ExchangeMove& move) override {
        note_priced(move);
        scratch_entries_.clear();
        const int n = design_.n();
        const auto& x = design_.points;
        const int c = move.column;
        const int i = move.row_i;
        const int j = move.row_j;
        const double xi = x(i, c);
        const double xj = x(j, c);

        double changed_min = kInf;
        std::multiset<double> removed;
        for (int k = 0; k < n; ++k) {
            if (k == i || k == j) continue;
            const double xk = x(k, c);
            for (const auto& [row, fresh] : {std::pair{i, xj}, std::pair{j, xi}}) {
                const double stale = row == i ? xi : xj;
                const double old = dqq_(row, k);
                double nd = old - abs_pow(stale - xk, q_) + abs_pow(fresh - xk, q_);
                if (nd < 0.0) nd = 0.0;
                changed_min = std::min(changed_min, nd);
                removed.insert(old);
                scratch_entries_.push_back({row, k, nd});
            }
        }
        // Smallest pair value that the move does not touch.
        double unchanged_min = kInf;
        for (const double v : values_) {
            const auto hit = removed.find(v);
            if (hit != removed.end()) {
                removed.erase(hit);
                continue;
            }
            unchanged_min = v;
            break;
        }
        return root(std::min(changed_min, unchanged_min));
    }

    void rebuild() override {
        const int n = design_.n();
        dqq_.resize(n, n);
        values_.clear();
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                double s = 0.0;
                for (int l = 0; l < design_.d(); ++l)
                    s += abs_pow(design_.points(i, l) - design_.points(j, l), q_);
                dqq_(i, j) = dqq_(j, i) = s;
                values_.insert(s);
            }
        }
    }

protected:
    void apply(const ExchangeMove&) override {
        for (const auto& [row, other, nd] : scratch_entries_) {
            values_.erase(values_.find(dqq_(row, other)));
            values_.insert(nd);
            dqq_(row, other) = dqq_(other, row) = nd;
        }
    }

private:
    double root(double s) const {
        if (q_ == 1) return s;
        if (q_ == 2) return std::sqrt(s);
        return std::pow(s, 1.0 / q_);
    }

    int q_;
    Eigen::MatrixXd dqq_;
    std::multiset<double> values_;
    std::vector<std::tuple<int, int, double>> scratch_entries_;
};

// ---------------------------------------------------------------------------
// MaxPro: log-products per pair. A changed pair is recomputed across all d
// coordinates rather than patched, which keeps each stored term exact no
// matter how small the gaps get.
// ---------------------------------------------------------------------------
class MaxProCache final : public CriterionCache {
public:
    explicit MaxProCache(Design design) : CriterionCache(std::move(design)) {
        MaxProCache::rebuild();
    }

    double value() const override {
        return std::exp((shift_ + std::log(sum_) - log_pairs_) / design_.d());
    }

    double value_after(const ExchangeMove& move) override {
        note_priced(move);
        scratch_entries_.clear();
        scratch_valid_ = false;
        const int n = design_.n();
        const auto& x = design_.points;
        const int c = move.column;
        const int i = move.row_i;
        const int j = move.row_j;
        const double xi = x(i, c);
        const double xj = x(j, c);

        double delta_sum = 0.0;
        for (int k = 0; k < n; ++k) {
            if (k == i || k == j) continue;
            for (const auto& [row, fresh] : {std::pair{i, xj}, std::pair{j, xi}}) {
                double lt = 0.0;
                for (int l = 0; l < design_.d(); ++l) {
                    const double a = l == c ? fresh : x(row, l);
                    const double delta = a - x(k, l);
                    if (delta == 0.0) return kInf;  // projected collision
                    lt += std::log(delta * delta);
                }
                const double new_a = -lt;
                if (new_a - shift_ > 690.0) {
                    pending_rebuild_ = true;
                    return full_price(move);
                }
                delta_sum += std::exp(new_a - shift_) - std::exp(-lt_(row, k) - shift_);
                scratch_entries_.push_back({row, k, lt});
            }
        }
        const double proposed = sum_ + delta_sum;
        if (!(proposed > 0.0) || !std::isfinite(proposed)) {
            pending_rebuild_ = true;
            return full_price(move);
        }
        scratch_sum_ = proposed;
        scratch_valid_ = true;
        return std::exp((shift_ + std::log(proposed) - log_pairs_) / design_.d());
    }

    void rebuild() override {
        const int n = design_.n();
        lt_.resize(n, n);
        lt_.setZero();
        log_pairs_ = std::log(static_cast<double>(n) * (n - 1) / 2.0);
        double max_a = -kInf;
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                double lt = 0.0;
                for (int l = 0; l < design_.d(); ++l) {
                    const double delta = design_.points(i, l) - design_.points(j, l);
                    if (delta == 0.0)
                        throw DegenerateDesignError("maxpro: repeated coordinate value");
                    lt += std::log(delta * delta);
                }
                lt_(i, j) = lt_(j, i) = lt;
                max_a = std::max(max_a, -lt);
            }
        }
        shift_ = max_a;
        sum_ = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) sum_ += std::exp(-lt_(i, j) - shift_);
    }

protected:
    void apply(const ExchangeMove&) override {
        if (!scratch_valid_) {
            pending_rebuild_ = true;
            return;
        }
        for (const auto& [row, other, lt] : scratch_entries_) lt_(row, other) = lt_(other, row) = lt;
        sum_ = scratch_sum_;
        if (sum_ < 1e-250 || sum_ > 1e250) pending_rebuild_ = true;
    }

private:
    double full_price(const ExchangeMove& move) {
        swap_entries(move);
        double v;
        try {
            v = maxpro(design_);
        } catch (const DegenerateDesignError&) {
            v = kInf;
        }
        swap_entries(move);
        return v;
    }

    Eigen::MatrixXd lt_;
    double shift_ = 0.0;
    double sum_ = 0.0;
    double log_pairs_ = 0.0;
    std::vector<std::tuple<int, int, double>> scratch_entries_;
    double scratch_sum_ = 0.0;
    bool scratch_valid_ = false;
};

// ---------------------------------------------------------------------------
// ARD: plain running sum of the reciprocal projected-distance terms; only
// subsets containing the moved column contribute to a delta. For moderate
// sizes the per-subset pair terms are cached so a move prices each affected
// pair with a single root chain.
// ---------------------------------------------------------------------------
class ArdCache final : public CriterionCache {
public:
    ArdCache(Design design, std::vector<int> orders, double lambda)
        : CriterionCache(std::move(design)), orders_(std::move(orders)), lambda_(lambda) {
        const int d = design_.d();
        const int n = design_.n();
        if (orders_.empty()) throw std::invalid_argument("ard: J must be nonempty");
        for (const int k : orders_)
            if (k < 1 || k > d) throw std::invalid_argument("ard: projection order outside 1..d");
        double subset_count = 0.0;
        for (const int k : orders_) {
            detail::for_each_subset(d, k, [&](const std::vector<int>& subset) {
                subsets_.push_back(subset);
            });
            subset_count += detail::binomial(d, k);
        }
        norm_ = static_cast<double>(n) * (n - 1) / 2.0 * subset_count;
        by_column_.resize(static_cast<std::size_t>(d));
        for (std::size_t u = 0; u < subsets_.size(); ++u)
            for (const int col : subsets_[u]) by_column_[static_cast<std::size_t>(col)].push_back(u);
        cache_terms_ =
            static_cast<double>(subsets_.size()) * n * n <= 8e6;  // ~64 MB ceiling
        ArdCache::rebuild();
    }

    double value() const override {
        const double mean = sum_ / norm_;
        return lambda_ == 1.0 ? mean : std::pow(mean, 1.0 / lambda_);
    }

    double value_after(const ExchangeMove& move) override {
        note_priced(move);
        scratch_cols_.clear();
        const int n = design_.n();
        const auto& x = design_.points;
        const int c = move.column;
        const int i = move.row_i;
        const int j = move.row_j;
        const double xi = x(i, c);
        const double xj = x(j, c);

        const auto& affected = by_column_[static_cast<std::size_t>(c)];
        if (cache_terms_ &&
            scratch_terms_.cols() < static_cast<Eigen::Index>(2 * affected.size()))
            scratch_terms_.resize(n, static_cast<Eigen::Index>(2 * affected.size()));
        base_.resize(n);
        sq_new_.resize(n);

        double delta = 0.0;
        for (const std::size_t u : affected) {
            const auto& subset = subsets_[u];
            const double sqrt_k = sqrt_orders_[u];
            for (const auto& [row, stale, fresh] :
                 {std::tuple{i, xi, xj}, std::tuple{j, xj, xi}}) {
                const int other = row == i ? j : i;
                // Projected squared distances from `row` to every run with
                // the moved column at its new value.
                base_.setZero();
                for (const int col : subset) {
                    if (col == c) continue;
                    base_ += (x(row, col) - x.col(col).array()).square();
                }
                sq_new_ = base_ + (fresh - x.col(c).array()).square();
                // The self pair and the partner pair (invariant) are masked.
                sq_new_[row] = sq_new_[other] = 1.0;
                if ((sq_new_ <= 0.0).any()) {
                    scratch_valid_ = false;
                    return kInf;  // projected collision
                }
                if (cache_terms_) {
                    auto news =
                        scratch_terms_.col(static_cast<Eigen::Index>(scratch_cols_.size())).array();
                    if (lambda_ == 1.0) {
                        news = sqrt_k * sq_new_.sqrt().sqrt().inverse();
                    } else {
                        news = (sqrt_k * sq_new_.sqrt().sqrt().inverse()).pow(lambda_);
                    }
                    const auto olds = terms_[u].col(row).array();
                    news[row] = olds[row];
                    news[other] = olds[other];
                    delta += (news - olds).sum();
                    scratch_cols_.push_back({u, row});
                } else {
                    sq_old_ = base_ + (stale - x.col(c).array()).square();
                    sq_old_[row] = sq_old_[other] = 1.0;
                    if (lambda_ == 1.0) {
                        diff_ = sqrt_k *
                                (sq_new_.sqrt().sqrt().inverse() - sq_old_.sqrt().sqrt().inverse());
                    } else {
                        diff_ = (sqrt_k * sq_new_.sqrt().sqrt().inverse()).pow(lambda_) -
                                (sqrt_k * sq_old_.sqrt().sqrt().inverse()).pow(lambda_);
                    }
                    diff_[row] = diff_[other] = 0.0;
                    delta += diff_.sum();
                }
            }
        }
        scratch_valid_ = true;
        scratch_sum_ = sum_ + delta;
        const double mean = scratch_sum_ / norm_;
        return lambda_ == 1.0 ? mean : std::pow(mean, 1.0 / lambda_);
    }

    void rebuild() override {
        sqrt_orders_.clear();
        for (const auto& subset : subsets_)
            sqrt_orders_.push_back(std::sqrt(static_cast<double>(subset.size())));
        const int n = design_.n();
        if (cache_terms_) terms_.assign(subsets_.size(), Eigen::MatrixXd::Zero(n, n));
        sum_ = 0.0;
        for (std::size_t u = 0; u < subsets_.size(); ++u) {
            const auto& subset = subsets_[u];
            for (int i = 0; i < n; ++i) {
                for (int j = i + 1; j < n; ++j) {
                    double sq = 0.0;
                    for (const int col : subset) {
                        const double dk = design_.points(i, col) - design_.points(j, col);
                        sq += dk * dk;
                    }
                    if (sq <= 0.0) throw DegenerateDesignError("ard: coincident projected runs");
                    const double t = term(sqrt_orders_[u], sq);
                    if (cache_terms_) terms_[u](i, j) = terms_[u](j, i) = t;
                    sum_ += t;
                }
            }
        }
    }

protected:
    void apply(const ExchangeMove&) override {
        if (!scratch_valid_) {
            pending_rebuild_ = true;
            return;
        }
        sum_ = scratch_sum_;
        for (std::size_t s = 0; s < scratch_cols_.size(); ++s) {
            const auto& [u, row] = scratch_cols_[s];
            terms_[u].col(row) = scratch_terms_.col(static_cast<Eigen::Index>(s));
            terms_[u].row(row) = scratch_terms_.col(static_cast<Eigen::Index>(s)).transpose();
        }
    }

private:
    double term(double sqrt_k, double sq) const {
        const double base = sqrt_k / std::sqrt(std::sqrt(sq));
        return lambda_ == 1.0 ? base : std::pow(base, lambda_);
    }

    std::vector<int> orders_;
    double lambda_;
    std::vector<std::vector<int>> subsets_;
    std::vector<double> sqrt_orders_;
    std::vector<std::vector<std::size_t>> by_column_;
    bool cache_terms_ = false;
    std::vector<Eigen::MatrixXd> terms_;
    double norm_ = 1.0;
    double sum_ = 0.0;
    double scratch_sum_ = 0.0;
    bool scratch_valid_ = false;
    std::vector<std::pair<std::size_t, int>> scratch_cols_;
    Eigen::MatrixXd scratch_terms_;
    Eigen::ArrayXd base_;
    Eigen::ArrayXd sq_old_;
    Eigen::ArrayXd sq_new_;
    Eigen::ArrayXd diff_;
};

// ---------------------------------------------------------------------------
// Centered-L2 discrepancy over a fixed family of column subsets. Covers both
// the UP criterion (all two-column subsets, averaged) and the full-design CD
// (a single subset). Works on the level coding, which an exchange move
// simply permutes within the moved column.
// ---------------------------------------------------------------------------
class DiscrepancyCache final : public CriterionCache {
public:
    DiscrepancyCache(Design design, int s, std::vector<std::vector<int>> subsets, double scale)
        : CriterionCache(std::move(design)), s_(s), subsets_(std::move(subsets)), scale_(scale) {
        const Eigen::MatrixXi levels = discrepancy_levels(design_, s_);
        z_.resize(levels.rows(), levels.cols());
        for (int i = 0; i < z_.rows(); ++i)
            for (int k = 0; k < z_.cols(); ++k)
                z_(i, k) = (2.0 * levels(i, k) - s_ + 1.0) / (2.0 * s_);
        by_column_.resize(static_cast<std::size_t>(design_.d()));
        for (std::size_t u = 0; u < subsets_.size(); ++u)
            for (const int col : subsets_[u]) by_column_[static_cast<std::size_t>(col)].push_back(u);
        DiscrepancyCache::rebuild();
    }

    double value() const override {
        double total = 0.0;
        for (std::size_t u = 0; u < subsets_.size(); ++u) total += cd(u);
        return total * scale_;
    }

    double value_after(const ExchangeMove& move) override {
        note_priced(move);
        scratch_.clear();
        const int n = design_.n();
        const int c = move.column;
        const int i = move.row_i;
        const int j = move.row_j;
        const double zic = z_(i, c);
        const double zjc = z_(j, c);

        zc_old_ = z_.col(c).array();
        zc_post_ = zc_old_;
        std::swap(zc_post_[i], zc_post_[j]);

        double total = value();
        for (const std::size_t u : by_column_[static_cast<std::size_t>(c)]) {
            const auto& subset = subsets_[u];
            // Row sums of the pair-factor product matrix, before and after
            // the swap. The (i,j) entry is invariant and cancels.
            const double ds_i =
                row_sum(subset, i, c, zjc, zc_post_) - row_sum(subset, i, c, zic, zc_old_);
            const double ds_j =
                row_sum(subset, j, c, zic, zc_post_) - row_sum(subset, j, c, zjc, zc_old_);
            const double dii = diag(subset, i, c, zjc) - diag(subset, i, c, zic);
            const double djj = diag(subset, j, c, zic) - diag(subset, j, c, zjc);
            const double dterm1 = 2.0 * (ds_i + ds_j) - dii - djj;
            const double dterm2 = single(subset, i, c, zjc) - single(subset, i, c, zic) +
                                  single(subset, j, c, zic) - single(subset, j, c, zjc);
            const double nn = static_cast<double>(n);
            const double dcd = dterm1 / (nn * nn) - 2.0 * dterm2 / nn;
            scratch_.push_back({u, dterm1, dterm2});
            total += dcd * scale_;
        }
        return total;
    }

    void rebuild() override {
        term1_.assign(subsets_.size(), 0.0);
        term2_.assign(subsets_.size(), 0.0);
        const int n = design_.n();
        for (std::size_t u = 0; u < subsets_.size(); ++u) {
            const auto& subset = subsets_[u];
            double t1 = 0.0;
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) {
                    double prod = 1.0;
                    for (const int col : subset) prod *= pair_factor(z_(a, col), z_(b, col));
                    t1 += prod;
                }
            double t2 = 0.0;
            for (int a = 0; a < n; ++a) {
                double prod = 1.0;
                for (const int col : subset) prod *= single_factor(z_(a, col));
                t2 += prod;
            }
            term1_[u] = t1;
            term2_[u] = t2;
        }
    }

protected:
    void apply(const ExchangeMove& move) override {
        for (const auto& [u, dt1, dt2] : scratch_) {
            term1_[u] += dt1;
            term2_[u] += dt2;
        }
        std::swap(z_(move.row_i, move.column), z_(move.row_j, move.column));
    }

private:
    static double pair_factor(double zi, double zj) {
        return 1.0 + 0.5 * std::abs(zi) + 0.5 * std::abs(zj) - 0.5 * std::abs(zi - zj);
    }
    static double single_factor(double zi) { return 1.0 + 0.5 * std::abs(zi) - 0.5 * zi * zi; }

    double cd(std::size_t u) const {
        const double nn = static_cast<double>(design_.n());
        return term1_[u] / (nn * nn) - 2.0 * term2_[u] / nn +
               std::pow(13.0 / 12.0, static_cast<int>(subsets_[u].size()));
    }

    // Sum over all runs b of the subset product for row `row`, with the
    // moved column taking the value `z_row_c` for the row and the array `zc`
    // (pre- or post-swap) for the b side.
    double row_sum(const std::vector<int>& subset, int row, int c, double z_row_c,
                   const Eigen::ArrayXd& zc) const {
        prod_.setOnes(design_.n());
        for (const int col : subset) {
            if (col == c) {
                prod_ *= 1.0 + 0.5 * std::abs(z_row_c) + 0.5 * zc.abs() - 0.5 * (z_row_c - zc).abs();
            } else {
                const double zr = z_(row, col);
                const auto zb = z_.col(col).array();
                prod_ *= 1.0 + 0.5 * std::abs(zr) + 0.5 * zb.abs() - 0.5 * (zr - zb).abs();
            }
        }
        return prod_.sum();
    }

    double diag(const std::vector<int>& subset, int row, int c, double z_row_c) const {
        double prod = 1.0;
        for (const int col : subset) {
            const double zr = col == c ? z_row_c : z_(row, col);
            prod *= pair_factor(zr, zr);
        }
        return prod;
    }

    double single(const std::vector<int>& subset, int row, int c, double z_row_c) const {
        double prod = 1.0;
        for (const int col : subset) {
            const double zr = col == c ? z_row_c : z_(row, col);
            prod *= single_factor(zr);
        }
        return prod;
    }

    int s_;
    std::vector<std::vector<int>> subsets_;
    double scale_;
    Eigen::MatrixXd z_;
    std::vector<double> term1_;
    std::vector<double> term2_;
    std::vector<std::vector<std::size_t>> by_column_;
    std::vector<std::tuple<std::size_t, double, double>> scratch_;
    Eigen::ArrayXd zc_old_;
    Eigen::ArrayXd zc_post_;
    mutable Eigen::ArrayXd prod_;
};

// ---------------------------------------------------------------------------
// Column correlations: means and norms are invariant under within-column
// swaps, so only the cross products against the moved column change.
// ---------------------------------------------------------------------------
class CorrelationCache final : public CriterionCache {
public:
    CorrelationCache(Design design, CorrelationMode mode)
        : CriterionCache(std::move(design)), mode_(mode) {
        if (design_.d() < 2)
            throw std::invalid_argument("column_correlations: need at least 2 columns");
        CorrelationCache::rebuild();
    }

    double value() const override {
        return combine([&](int a, int b) { return cross_(a, b); });
    }

    double value_after(const ExchangeMove& move) override {
        note_priced(move);
        scratch_.assign(static_cast<std::size_t>(design_.d()), 0.0);
        const int c = move.column;
        const int i = move.row_i;
        const int j = move.row_j;
        const double ui = design_.points(i, c) - mean_[c];
        const double uj = design_.points(j, c) - mean_[c];
        for (int b = 0; b < design_.d(); ++b) {
            if (b == c) continue;
            const double vi = design_.points(i, b) - mean_[b];
            const double vj = design_.points(j, b) - mean_[b];
            scratch_[static_cast<std::size_t>(b)] = (uj - ui) * (vi - vj);
        }
        return combine([&](int a, int b) {
            double v = cross_(a, b);
            if (a == c) v += scratch_[static_cast<std::size_t>(b)];
            if (b == c) v += scratch_[static_cast<std::size_t>(a)];
            return v;
        });
    }

    void rebuild() override {
        const int d = design_.d();
        mean_ = design_.points.colwise().mean();
        const Eigen::MatrixXd centered = design_.points.rowwise() - mean_.transpose();
        norm_ = centered.colwise().norm();
        for (int j = 0; j < d; ++j)
            if (norm_[j] == 0.0)
                throw DegenerateDesignError("column_correlations: constant column " +
                                            std::to_string(j + 1));
        cross_ = centered.transpose() * centered;
    }

protected:
    void apply(const ExchangeMove& move) override {
        const int c = move.column;
        for (int b = 0; b < design_.d(); ++b) {
            if (b == c) continue;
            cross_(c, b) += scratch_[static_cast<std::size_t>(b)];
            cross_(b, c) = cross_(c, b);
        }
    }

private:
    template <typename CrossFn>
    double combine(CrossFn&& cross) const {
        const int d = design_.d();
        double sum = 0.0;
        double worst = 0.0;
        for (int a = 0; a < d; ++a) {
            for (int b = a + 1; b < d; ++b) {
                const double rho = std::abs(cross(a, b) / (norm_[a] * norm_[b]));
                sum += rho;
                worst = std::max(worst, rho);
            }
        }
        if (mode_ == CorrelationMode::Maximum) return worst;
        return sum * 2.0 / (static_cast<double>(d) * (d - 1));
    }

    CorrelationMode mode_;
    Eigen::VectorXd mean_;
    Eigen::VectorXd norm_;
    Eigen::MatrixXd cross_;
    std::vector<double> scratch_;
};

// ---------------------------------------------------------------------------
// Fallback for criteria without a delta rule: full re-evaluation per move.
// ---------------------------------------------------------------------------
class GenericCache final : public CriterionCache {
public:
    GenericCache(Design design, CriterionSpec spec)
        : CriterionCache(std::move(design)), spec_(std::move(spec)) {
        GenericCache::rebuild();
    }

    double value() const override { return value_; }

    double value_after(const ExchangeMove& move) override {
        note_priced(move);
        swap_entries(move);
        try {
            scratch_ = evaluate(design_, spec_);
        } catch (const DegenerateDesignError&) {
            scratch_ = kInf;
        }
        swap_entries(move);
        return scratch_;
    }

    void rebuild() override { value_ = evaluate(design_, spec_); }

protected:
    void apply(const ExchangeMove&) override {
        if (!std::isfinite(scratch_)) {
            pending_rebuild_ = true;
            return;
        }
        value_ = scratch_;
    }

private:
    CriterionSpec spec_;
    double value_ = 0.0;
    double scratch_ = 0.0;
};

}  // namespace

std::unique_ptr<CriterionCache> make_criterion_cache(const Design& design,
                                                     const CriterionSpec& spec) {
    switch (spec.kind) {
        case CriterionKind::MinDistance:
            return std::make_unique<MinDistCache>(design, spec.q);
        case CriterionKind::PhiP:
            return std::make_unique<PhiPCache>(design, spec.q, spec.p);
        case CriterionKind::MaxPro:
            return std::make_unique<MaxProCache>(design);
        case CriterionKind::Ard:
            return std::make_unique<ArdCache>(design, spec.projection_orders, spec.lambda);
        case CriterionKind::UniformProjection: {
            const int s = spec.s_levels > 0 ? spec.s_levels : design.n();
            std::vector<std::vector<int>> subsets;
            detail::for_each_subset(design.d(), 2, [&](const std::vector<int>& subset) {
                subsets.push_back(subset);
            });
            if (subsets.empty())
                throw std::invalid_argument("uniform_projection: need at least 2 columns");
            const double scale = 1.0 / detail::binomial(design.d(), 2);
            return std::make_unique<DiscrepancyCache>(design, s, std::move(subsets), scale);
        }
        case CriterionKind::CenteredL2: {
            const int s = spec.s_levels > 0 ? spec.s_levels : design.n();
            std::vector<std::vector<int>> subsets(1);
            for (int j = 0; j < design.d(); ++j) subsets[0].push_back(j);
            return std::make_unique<DiscrepancyCache>(design, s, std::move(subsets), 1.0);
        }
        case CriterionKind::AvgAbsCorrelation:
            return std::make_unique<CorrelationCache>(design, CorrelationMode::Average);
        case CriterionKind::MaxAbsCorrelation:
            return std::make_unique<CorrelationCache>(design, CorrelationMode::Maximum);
        case CriterionKind::FillDistance:
        case CriterionKind::StarDiscrepancy:
            return std::make_unique<GenericCache>(design, spec);
    }
    throw std::invalid_argument("make_criterion_cache: unknown criterion kind");
}

}  // namespace sfd
