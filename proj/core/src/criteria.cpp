#include "sfd/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sfd/errors.hpp"

namespace sfd {

CriterionSpec CriterionSpec::min_distance(int q) {
    CriterionSpec s;
    s.kind = CriterionKind::MinDistance;
    s.direction = Direction::Maximize;
    s.q = q;
    return s;
}

CriterionSpec CriterionSpec::phi_p(int q, int p) {
    CriterionSpec s;
    s.kind = CriterionKind::PhiP;
    s.q = q;
    s.p = p;
    return s;
}

CriterionSpec CriterionSpec::fill_distance(int budget, RngSeed seed) {
    CriterionSpec s;
    s.kind = CriterionKind::FillDistance;
    s.budget = budget;
    s.mc_seed = seed;
    return s;
}

CriterionSpec CriterionSpec::ard(std::vector<int> orders, double lambda) {
    CriterionSpec s;
    s.kind = CriterionKind::Ard;
    s.projection_orders = std::move(orders);
    s.lambda = lambda;
    return s;
}

CriterionSpec CriterionSpec::maxpro() {
    CriterionSpec s;
    s.kind = CriterionKind::MaxPro;
    return s;
}

CriterionSpec CriterionSpec::uniform_projection(int s_levels) {
    CriterionSpec s;
    s.kind = CriterionKind::UniformProjection;
    s.s_levels = s_levels;
    return s;
}

CriterionSpec CriterionSpec::centered_l2(int s_levels) {
    CriterionSpec s;
    s.kind = CriterionKind::CenteredL2;
    s.s_levels = s_levels;
    return s;
}

CriterionSpec CriterionSpec::avg_abs_correlation() {
    CriterionSpec s;
    s.kind = CriterionKind::AvgAbsCorrelation;
    return s;
}

CriterionSpec CriterionSpec::max_abs_correlation() {
    CriterionSpec s;
    s.kind = CriterionKind::MaxAbsCorrelation;
    return s;
}

CriterionSpec CriterionSpec::star_discrepancy(int budget, RngSeed seed) {
    CriterionSpec s;
    s.kind = CriterionKind::StarDiscrepancy;
    s.budget = budget;
    s.mc_seed = seed;
    return s;
}

DomainBox DomainBox::unit(int d) {
    DomainBox box;
    box.lower = Eigen::VectorXd::Zero(d);
    box.upper = Eigen::VectorXd::Ones(d);
    return box;
}

int default_phi_p_exponent(int n) {
    if (n < 30) return 5;
    if (n < 150) return 20;
    return 50;
}

double lq_distance(const Eigen::Ref<const Eigen::RowVectorXd, 0, Eigen::InnerStride<>>& a,
                   const Eigen::Ref<const Eigen::RowVectorXd, 0, Eigen::InnerStride<>>& b,
                   int q) {
    if (a.size() != b.size()) throw std::invalid_argument("lq_distance: dimension mismatch");
    if (q < 1) throw std::invalid_argument("lq_distance: q must be >= 1");
    if (q == 2) return (a - b).norm();
    if (q == 1) return (a - b).cwiseAbs().sum();
    double sum = 0.0;
    for (Eigen::Index k = 0; k < a.size(); ++k) sum += std::pow(std::abs(a[k] - b[k]), q);
    return std::pow(sum, 1.0 / q);
}

double min_interpoint_distance(const Design& design, int q) {
    const int n = design.n();
    if (n < 2) throw std::invalid_argument("min_interpoint_distance: need at least 2 runs");
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            best = std::min(best, lq_distance(design.points.row(i), design.points.row(j), q));
    return best;
}

double phi_p(const Design& design, int q, int p) {
    const int n = design.n();
    if (n < 2) throw std::invalid_argument("phi_p: need at least 2 runs");
    if (p < 1) throw std::invalid_argument("phi_p: p must be >= 1");

    // a_ij = -p log d_ij; phi_p = exp(logsumexp(a) / p).
    std::vector<double> log_terms;
    log_terms.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double dist = lq_distance(design.points.row(i), design.points.row(j), q);
            if (dist <= 0.0)
                throw DegenerateDesignError("phi_p: coincident runs make the criterion infinite");
            log_terms.push_back(-static_cast<double>(p) * std::log(dist));
        }
    }
    const double m = *std::max_element(log_terms.begin(), log_terms.end());
    double sum = 0.0;
    for (const double t : log_terms) sum += std::exp(t - m);
    return std::exp((m + std::log(sum)) / p);
}

namespace {

double min_sq_dist_to_design(const Design& design, const Eigen::VectorXd& x) {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < design.n(); ++i) {
        const double d2 = (design.points.row(i).transpose() - x).squaredNorm();
        best = std::min(best, d2);
    }
    return best;
}

std::vector<double> fill_grid_candidates(const Design& design, const DomainBox& box, int j) {
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(design.n()) + 2);
    values.push_back(box.lower[j]);
    values.push_back(box.upper[j]);
    for (int i = 0; i < design.n(); ++i) values.push_back(design.points(i, j));
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    std::vector<double> with_midpoints;
    with_midpoints.reserve(values.size() * 2);
    for (std::size_t k = 0; k < values.size(); ++k) {
        with_midpoints.push_back(values[k]);
        if (k + 1 < values.size()) with_midpoints.push_back(0.5 * (values[k] + values[k + 1]));
    }
    return with_midpoints;
}

}  // namespace

double fill_distance_estimate(const Design& design, const DomainBox& box, FillMethod method,
                              int budget, RngSeed seed) {
    const int d = design.d();
    if (box.dim() != d) throw std::invalid_argument("fill_distance_estimate: box dimension mismatch");

    if (method == FillMethod::MonteCarlo) {
        if (budget < 1) throw std::invalid_argument("fill_distance_estimate: budget must be >= 1");
        Rng rng(seed);
        Eigen::VectorXd x(d);
        double best = 0.0;
        for (int t = 0; t < budget; ++t) {
            for (int j = 0; j < d; ++j)
                x[j] = box.lower[j] + rng.uniform01() * (box.upper[j] - box.lower[j]);
            best = std::max(best, min_sq_dist_to_design(design, x));
        }
        return std::sqrt(best);
    }

    if (d > 3)
        throw std::invalid_argument(
            "fill_distance_estimate: the exact grid is only supported for d <= 3");
    std::vector<std::vector<double>> grid;
    grid.reserve(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) grid.push_back(fill_grid_candidates(design, box, j));

    Eigen::VectorXd x(d);
    std::vector<std::size_t> index(static_cast<std::size_t>(d), 0);
    double best = 0.0;
    while (true) {
        for (int j = 0; j < d; ++j) x[j] = grid[static_cast<std::size_t>(j)][index[static_cast<std::size_t>(j)]];
        best = std::max(best, min_sq_dist_to_design(design, x));
        int j = 0;
        for (; j < d; ++j) {
            auto& ij = index[static_cast<std::size_t>(j)];
            if (++ij < grid[static_cast<std::size_t>(j)].size()) break;
            ij = 0;
        }
        if (j == d) break;
    }
    return std::sqrt(best);
}

namespace {

// Visits every size-k subset of {0,...,d-1} in lexicographic order.
template <typename Fn>
void for_each_subset(int d, int k, Fn&& fn) {
    std::vector<int> subset(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) subset[static_cast<std::size_t>(i)] = i;
    while (true) {
        fn(subset);
        int i = k - 1;
        while (i >= 0 && subset[static_cast<std::size_t>(i)] == d - k + i) --i;
        if (i < 0) break;
        ++subset[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k; ++j)
            subset[static_cast<std::size_t>(j)] = subset[static_cast<std::size_t>(j - 1)] + 1;
    }
}

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double result = 1.0;
    for (int i = 1; i <= k; ++i) result = result * (n - k + i) / i;
    return result;
}

}  // namespace

double ard(const Design& design, const std::vector<int>& projection_orders, double lambda) {
    const int n = design.n();
    const int d = design.d();
    if (n < 2) throw std::invalid_argument("ard: need at least 2 runs");
    if (projection_orders.empty()) throw std::invalid_argument("ard: J must be nonempty");
    if (lambda < 1.0) throw std::invalid_argument("ard: lambda must be >= 1");
    for (const int k : projection_orders)
        if (k < 1 || k > d) throw std::invalid_argument("ard: projection order outside 1..d");

    double subset_count = 0.0;
    for (const int k : projection_orders) subset_count += binomial(d, k);

    double sum = 0.0;
    for (const int k : projection_orders) {
        const double sqrt_k = std::sqrt(static_cast<double>(k));
        for_each_subset(d, k, [&](const std::vector<int>& subset) {
            for (int i = 0; i < n; ++i) {
                for (int j = i + 1; j < n; ++j) {
                    double sq = 0.0;
                    for (const int col : subset) {
                        const double delta = design.points(i, col) - design.points(j, col);
                        sq += delta * delta;
                    }
                    if (sq <= 0.0)
                        throw DegenerateDesignError("ard: coincident projected runs");
                    // term = (sqrt(k) / sqrt(d_2))^lambda with d_2 = sqrt(sq)
                    const double base = sqrt_k / std::sqrt(std::sqrt(sq));
                    sum += lambda == 1.0 ? base : std::pow(base, lambda);
                }
            }
        });
    }
    const double pairs = static_cast<double>(n) * (n - 1) / 2.0;
    const double mean = sum / (pairs * subset_count);
    return lambda == 1.0 ? mean : std::pow(mean, 1.0 / lambda);
}

double maxpro(const Design& design) {
    const int n = design.n();
    const int d = design.d();
    if (n < 2) throw std::invalid_argument("maxpro: need at least 2 runs");

    // a_ij = -sum_l log (x_il - x_jl)^2; psi = exp((logsumexp(a) - log C(n,2)) / d).
    std::vector<double> log_terms;
    log_terms.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            double log_prod = 0.0;
            for (int l = 0; l < d; ++l) {
                const double delta = design.points(i, l) - design.points(j, l);
                if (delta == 0.0)
                    throw DegenerateDesignError("maxpro: repeated coordinate value in a column");
                log_prod += 2.0 * std::log(std::abs(delta));
            }
            log_terms.push_back(-log_prod);
        }
    }
    const double m = *std::max_element(log_terms.begin(), log_terms.end());
    double sum = 0.0;
    for (const double t : log_terms) sum += std::exp(t - m);
    const double pairs = static_cast<double>(n) * (n - 1) / 2.0;
    return std::exp((m + std::log(sum) - std::log(pairs)) / d);
}

namespace {

inline double cd_pair_factor(double zi, double zj) {
    return 1.0 + 0.5 * std::abs(zi) + 0.5 * std::abs(zj) - 0.5 * std::abs(zi - zj);
}

inline double cd_single_factor(double zi) {
    return 1.0 + 0.5 * std::abs(zi) - 0.5 * zi * zi;
}

}  // namespace

double centered_l2_discrepancy(const Eigen::MatrixXi& levels, int s) {
    const int n = static_cast<int>(levels.rows());
    const int d = static_cast<int>(levels.cols());
    if (n < 1 || d < 1) throw std::invalid_argument("centered_l2_discrepancy: empty level matrix");
    if (s < 1) throw std::invalid_argument("centered_l2_discrepancy: s must be >= 1");
    if ((levels.array() < 0).any() || (levels.array() >= s).any())
        throw std::invalid_argument("centered_l2_discrepancy: levels must lie in 0..s-1");

    Eigen::MatrixXd z(n, d);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < d; ++k) z(i, k) = (2.0 * levels(i, k) - s + 1.0) / (2.0 * s);

    double term1 = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double prod = 1.0;
            for (int k = 0; k < d; ++k) prod *= cd_pair_factor(z(i, k), z(j, k));
            term1 += prod;
        }
    }
    double term2 = 0.0;
    for (int i = 0; i < n; ++i) {
        double prod = 1.0;
        for (int k = 0; k < d; ++k) prod *= cd_single_factor(z(i, k));
        term2 += prod;
    }
    const double nn = static_cast<double>(n);
    return term1 / (nn * nn) - 2.0 * term2 / nn + std::pow(13.0 / 12.0, d);
}

double uniform_projection(const Eigen::MatrixXi& levels, int s) {
    const int d = static_cast<int>(levels.cols());
    if (d < 2) throw std::invalid_argument("uniform_projection: need at least 2 columns");
    double sum = 0.0;
    Eigen::MatrixXi pair(levels.rows(), 2);
    for (int a = 0; a < d; ++a) {
        for (int b = a + 1; b < d; ++b) {
            pair.col(0) = levels.col(a);
            pair.col(1) = levels.col(b);
            sum += centered_l2_discrepancy(pair, s);
        }
    }
    return sum * 2.0 / (static_cast<double>(d) * (d - 1));
}

Eigen::MatrixXi discrepancy_levels(const Design& design, int s) {
    if (s < 1) throw std::invalid_argument("discrepancy_levels: s must be >= 1");
    Eigen::MatrixXi levels(design.n(), design.d());
    for (int i = 0; i < design.n(); ++i) {
        for (int j = 0; j < design.d(); ++j) {
            const int bin = static_cast<int>(std::floor(design.points(i, j) * s));
            levels(i, j) = std::clamp(bin, 0, s - 1);
        }
    }
    return levels;
}

double column_correlations(const Design& design, CorrelationMode mode) {
    const int n = design.n();
    const int d = design.d();
    if (d < 2) throw std::invalid_argument("column_correlations: need at least 2 columns");

    const Eigen::RowVectorXd mean = design.points.colwise().mean();
    const Eigen::MatrixXd centered = design.points.rowwise() - mean;
    const Eigen::VectorXd norms = centered.colwise().norm();
    for (int j = 0; j < d; ++j)
        if (norms[j] == 0.0)
            throw DegenerateDesignError("column_correlations: constant column " +
                                        std::to_string(j + 1));
    (void)n;
    double sum = 0.0;
    double worst = 0.0;
    for (int a = 0; a < d; ++a) {
        for (int b = a + 1; b < d; ++b) {
            const double rho =
                std::abs(centered.col(a).dot(centered.col(b)) / (norms[a] * norms[b]));
            sum += rho;
            worst = std::max(worst, rho);
        }
    }
    if (mode == CorrelationMode::Maximum) return worst;
    return sum * 2.0 / (static_cast<double>(d) * (d - 1));
}

namespace {

double star_local_deviation(const Design& design, const Eigen::VectorXd& anchor) {
    // Open-box count only; suitable for anchors that avoid the run coordinates.
    int count = 0;
    for (int i = 0; i < design.n(); ++i) {
        bool inside = true;
        for (int j = 0; j < design.d(); ++j)
            if (design.points(i, j) >= anchor[j]) {
                inside = false;
                break;
            }
        count += inside;
    }
    double vol = 1.0;
    for (int j = 0; j < design.d(); ++j) vol *= anchor[j];
    return std::abs(static_cast<double>(count) / design.n() - vol);
}

std::vector<double> star_coordinate_grid(const Design& design, int j) {
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(design.n()) + 1);
    for (int i = 0; i < design.n(); ++i) values.push_back(design.points(i, j));
    values.push_back(1.0);
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    return values;
}

}  // namespace

double star_discrepancy(const Design& design, StarMethod method, int budget, RngSeed seed) {
    const int n = design.n();
    const int d = design.d();
    if ((design.points.array() < 0.0).any() || (design.points.array() >= 1.0).any())
        throw std::invalid_argument("star_discrepancy: entries must lie in [0,1)");

    if (method == StarMethod::MonteCarlo) {
        if (budget < 1) throw std::invalid_argument("star_discrepancy: budget must be >= 1");
        Rng rng(seed);
        Eigen::VectorXd anchor(d);
        double best = 0.0;
        for (int t = 0; t < budget; ++t) {
            for (int j = 0; j < d; ++j) anchor[j] = rng.uniform01();
            best = std::max(best, star_local_deviation(design, anchor));
        }
        return best;
    }

    if (d > 2 || n > 100)
        throw std::invalid_argument(
            "star_discrepancy: the exact method is only supported for d <= 2, n <= 100");

    // At grid anchor y, the supremum contributions are vol(y) minus the open
    // count (boxes approaching y from below) and the closed count minus
    // vol(y) (boxes approaching from above).
    std::vector<std::vector<double>> grid;
    for (int j = 0; j < d; ++j) grid.push_back(star_coordinate_grid(design, j));

    double best = 0.0;
    std::vector<std::size_t> index(static_cast<std::size_t>(d), 0);
    Eigen::VectorXd anchor(d);
    while (true) {
        for (int j = 0; j < d; ++j)
            anchor[j] = grid[static_cast<std::size_t>(j)][index[static_cast<std::size_t>(j)]];
        int open_count = 0;
        int closed_count = 0;
        for (int i = 0; i < n; ++i) {
            bool open_inside = true;
            bool closed_inside = true;
            for (int j = 0; j < d; ++j) {
                const double x = design.points(i, j);
                if (x >= anchor[j]) open_inside = false;
                if (x > anchor[j]) closed_inside = false;
                if (!closed_inside) break;
            }
            open_count += open_inside;
            closed_count += closed_inside;
        }
        double vol = 1.0;
        for (int j = 0; j < d; ++j) vol *= anchor[j];
        best = std::max(best, vol - static_cast<double>(open_count) / n);
        best = std::max(best, static_cast<double>(closed_count) / n - vol);

        int j = 0;
        for (; j < d; ++j) {
            auto& ij = index[static_cast<std::size_t>(j)];
            if (++ij < grid[static_cast<std::size_t>(j)].size()) break;
            ij = 0;
        }
        if (j == d) break;
    }
    return best;
}

double evaluate(const Design& design, const CriterionSpec& spec) {
    switch (spec.kind) {
        case CriterionKind::MinDistance:
            return min_interpoint_distance(design, spec.q);
        case CriterionKind::PhiP:
            return phi_p(design, spec.q, spec.p);
        case CriterionKind::FillDistance: {
            const auto box = DomainBox::unit(design.d());
            const FillMethod method =
                design.d() <= 2 ? FillMethod::ExactGrid : FillMethod::MonteCarlo;
            return fill_distance_estimate(design, box, method, spec.budget, spec.mc_seed);
        }
        case CriterionKind::Ard:
            return ard(design, spec.projection_orders, spec.lambda);
        case CriterionKind::MaxPro:
            return maxpro(design);
        case CriterionKind::UniformProjection: {
            const int s = spec.s_levels > 0 ? spec.s_levels : design.n();
            return uniform_projection(discrepancy_levels(design, s), s);
        }
        case CriterionKind::CenteredL2: {
            const int s = spec.s_levels > 0 ? spec.s_levels : design.n();
            return centered_l2_discrepancy(discrepancy_levels(design, s), s);
        }
        case CriterionKind::AvgAbsCorrelation:
            return column_correlations(design, CorrelationMode::Average);
        case CriterionKind::MaxAbsCorrelation:
            return column_correlations(design, CorrelationMode::Maximum);
        case CriterionKind::StarDiscrepancy: {
            const StarMethod method = (design.d() <= 2 && design.n() <= 100)
                                          ? StarMethod::Exact
                                          : StarMethod::MonteCarlo;
            return star_discrepancy(design, method, spec.budget, spec.mc_seed);
        }
    }
    throw std::invalid_argument("evaluate: unknown criterion kind");
}

std::string criterion_name(CriterionKind kind) {
    switch (kind) {
        case CriterionKind::MinDistance: return "min_distance";
        case CriterionKind::PhiP: return "phi_p";
        case CriterionKind::FillDistance: return "fill_distance";
        case CriterionKind::Ard: return "ard";
        case CriterionKind::MaxPro: return "maxpro";
        case CriterionKind::UniformProjection: return "up";
        case CriterionKind::CenteredL2: return "centered_l2";
        case CriterionKind::AvgAbsCorrelation: return "avg_abs_correlation";
        case CriterionKind::MaxAbsCorrelation: return "max_abs_correlation";
        case CriterionKind::StarDiscrepancy: return "star_discrepancy";
    }
    return "unknown";
}

CriterionKind criterion_from_name(const std::string& name) {
    if (name == "min_distance") return CriterionKind::MinDistance;
    if (name == "phi_p") return CriterionKind::PhiP;
    if (name == "fill_distance") return CriterionKind::FillDistance;
    if (name == "ard") return CriterionKind::Ard;
    if (name == "maxpro") return CriterionKind::MaxPro;
    if (name == "up") return CriterionKind::UniformProjection;
    if (name == "centered_l2") return CriterionKind::CenteredL2;
    if (name == "avg_abs_correlation") return CriterionKind::AvgAbsCorrelation;
    if (name == "max_abs_correlation") return CriterionKind::MaxAbsCorrelation;
    if (name == "star_discrepancy") return CriterionKind::StarDiscrepancy;
    throw NotFoundError("unknown criterion: " + name);
}

}  // namespace sfd
