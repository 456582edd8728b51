#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sfd/design.hpp"
#include "sfd/rng.hpp"

namespace sfd {

enum class CriterionKind {
    MinDistance,        // separation distance d_q(X); larger is better
    PhiP,               // Morris-Mitchell phi_p; smaller is better
    FillDistance,       // estimated fill distance; smaller is better
    Ard,                // average reciprocal projected distance
    MaxPro,             // maximum projection criterion
    UniformProjection,  // average centered-L2 discrepancy over 2D projections
    CenteredL2,         // squared centered L2 discrepancy of the full design
    AvgAbsCorrelation,  // mean |Pearson correlation| over column pairs
    MaxAbsCorrelation,  // worst-case |Pearson correlation|
    StarDiscrepancy,    // deviation of box counts from box volumes
};

enum class Direction { Minimize, Maximize };

/// Which space-filling objective to evaluate or optimize, with its
/// parameters. Build one via the factories below so the search direction and
/// defaults are always consistent with the kind.
struct CriterionSpec {
    CriterionKind kind = CriterionKind::PhiP;
    Direction direction = Direction::Minimize;
    int q = 2;                              // L_q distance order (>= 1)
    int p = 50;                             // phi_p exponent (>= 1)
    double lambda = 1.0;                    // ARD exponent (>= 1)
    std::vector<int> projection_orders{2};  // ARD's J, nonempty subset of {1..d}
    int s_levels = 0;                       // CD/UP level count; 0 = run count
    int budget = 10000;                     // Monte Carlo budget (fill/star)
    RngSeed mc_seed{1};                     // Monte Carlo stream

    static CriterionSpec min_distance(int q = 2);
    static CriterionSpec phi_p(int q = 2, int p = 50);
    static CriterionSpec fill_distance(int budget = 10000, RngSeed seed = RngSeed{1});
    static CriterionSpec ard(std::vector<int> orders = {2}, double lambda = 1.0);
    static CriterionSpec maxpro();
    static CriterionSpec uniform_projection(int s_levels = 0);
    static CriterionSpec centered_l2(int s_levels = 0);
    static CriterionSpec avg_abs_correlation();
    static CriterionSpec max_abs_correlation();
    static CriterionSpec star_discrepancy(int budget = 10000, RngSeed seed = RngSeed{1});
};

/// Axis-aligned evaluation domain for fill-distance estimation.
struct DomainBox {
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;

    static DomainBox unit(int d);
    int dim() const noexcept { return static_cast<int>(lower.size()); }
};

/// phi_p exponent recommended for a given run count: 5 for small designs,
/// 20 for moderate ones, 50 for large ones.
int default_phi_p_exponent(int n);

/// L_q distance between two points of equal dimension (q >= 1).
double lq_distance(const Eigen::Ref<const Eigen::RowVectorXd, 0, Eigen::InnerStride<>>& a,
                   const Eigen::Ref<const Eigen::RowVectorXd, 0, Eigen::InnerStride<>>& b,
                   int q);

/// d_q(X): the smallest pairwise L_q distance (needs n >= 2).
double min_interpoint_distance(const Design& design, int q);

/// phi_p(X) = (sum over pairs of d_q^-p)^(1/p), accumulated in log space so
/// large p and small gaps cannot overflow. Throws DegenerateDesignError when
/// two runs coincide.
double phi_p(const Design& design, int q, int p);

enum class FillMethod {
    ExactGrid,   // exhaustive candidate grid; supported for d <= 3
    MonteCarlo,  // max over random probes: a lower bound on the fill distance
};

/// Estimated fill distance of the design over `box`.
///
/// ExactGrid maximizes the distance-to-nearest-run over the Cartesian grid
/// built per coordinate from the run coordinates, the box bounds, and the
/// midpoints between consecutive candidates. MonteCarlo maximizes over
/// `budget` uniform probes and therefore underestimates.
double fill_distance_estimate(const Design& design, const DomainBox& box, FillMethod method,
                              int budget = 10000, RngSeed seed = RngSeed{1});

/// Average reciprocal projected distance over all projections with orders in
/// J: mean of (sqrt(k)/sqrt(d_2))^lambda over subsets and run pairs, to the
/// power 1/lambda. Smaller is better. Throws DegenerateDesignError when a
/// projected pair coincides.
double ard(const Design& design, const std::vector<int>& projection_orders, double lambda);

/// Maximum projection criterion: the 1/d-th power of the mean over run pairs
/// of the reciprocal product of squared coordinate gaps, accumulated in log
/// space. Throws DegenerateDesignError when a column repeats a value.
double maxpro(const Design& design);

/// Squared centered L2 discrepancy of an n x d level matrix with entries in
/// {0,...,s-1}, via the closed three-term formula with
/// z = (2*level - s + 1) / (2s).
double centered_l2_discrepancy(const Eigen::MatrixXi& levels, int s);

/// Uniform projection criterion: average centered L2 discrepancy over all
/// two-column projections (needs d >= 2).
double uniform_projection(const Eigen::MatrixXi& levels, int s);

/// Level coding used to evaluate CD/UP on a continuous design:
/// level = floor(s * x), which preserves the one-per-bin structure of a
/// Latin hypercube when s equals the run count.
Eigen::MatrixXi discrepancy_levels(const Design& design, int s);

enum class CorrelationMode { Average, Maximum };

/// Mean or worst-case |Pearson correlation| over column pairs (d >= 2).
/// Throws DegenerateDesignError for a constant column.
double column_correlations(const Design& design, CorrelationMode mode);

enum class StarMethod {
    Exact,       // exhaustive anchor grid; supported for d <= 2, n <= 100
    MonteCarlo,  // max over random anchors: a lower bound
};

/// Star discrepancy of the design: the largest deviation between the
/// fraction of runs inside an origin-anchored box and its volume.
double star_discrepancy(const Design& design, StarMethod method, int budget = 10000,
                        RngSeed seed = RngSeed{1});

/// Uniform dispatch: routes to the operation selected by `spec.kind` so the
/// optimizer and the CLI treat every criterion identically. CD/UP discretize
/// the design at spec.s_levels (default: run count); fill distance uses the
/// unit box (exact grid for d <= 2, Monte Carlo otherwise); star discrepancy
/// uses the exact method whenever it is supported.
double evaluate(const Design& design, const CriterionSpec& spec);

/// CLI-facing names ("phi_p", "maxpro", ...).
std::string criterion_name(CriterionKind kind);
CriterionKind criterion_from_name(const std::string& name);

}  // namespace sfd
