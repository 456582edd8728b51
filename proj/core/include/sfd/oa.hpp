#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sfd/design.hpp"
#include "sfd/rng.hpp"

namespace sfd {

/// An n x d array with entries in 1..s and declared strength t: every n x t
/// subarray contains each of the s^t level combinations exactly
/// lambda = n / s^t times. The declared strength is recorded at parse time
/// and checked by verify_strength.
struct OrthogonalArray {
    Eigen::MatrixXi rows;  // n x d, entries in 1..s
    int s = 0;             // level count
    int t = 0;             // declared strength

    int n() const noexcept { return static_cast<int>(rows.rows()); }
    int d() const noexcept { return static_cast<int>(rows.cols()); }
    long long lambda_index() const;  // n / s^t
};

/// Parse the plain-text OA format: a header line `n d s t`, then n rows of d
/// whitespace-separated integers in 1..s. Throws ParseError with the
/// offending line number.
OrthogonalArray parse_oa(std::istream& in);
OrthogonalArray parse_oa(const std::string& text);
OrthogonalArray parse_oa_file(const std::string& path);

/// True iff every t-column projection of `oa` hits each of the s^t level
/// combinations exactly n/s^t times. Returns false outright when s^t does
/// not divide n.
bool verify_strength(const OrthogonalArray& oa, int t);

/// Tang's construction: per column, the n/s positions holding level m are
/// replaced by a random permutation of (m-1)n/s+1, ..., mn/s. The result is
/// a Latin hypercube whose realization keeps the t-dimensional projection
/// property of the source array. Requires the declared strength to verify.
LatinHypercube oa_based_lhd(const OrthogonalArray& oa, RngSeed seed);

/// Occupancy counts over the s^|columns| cells obtained by splitting each
/// selected axis into s half-open bins [k/s, (k+1)/s). `counts` is laid out
/// with the first selected column as the fastest-varying index.
struct CellCounts {
    std::vector<int> counts;
    int s = 0;
    int t = 0;

    int at(const std::vector<int>& cell) const;  // cell entries in 0..s-1
};
CellCounts projection_cell_counts(const Design& design, const std::vector<int>& columns, int s);

/// Best known lower bound on the number of mutually orthogonal Latin
/// hypercube columns at a given run size.
struct OlhBound {
    int n = 0;
    int k_lower_bound = 0;
    std::string source;  // construction reference or derivation rule
    bool tabulated = false;
};

/// Look up the bound for run size n (n >= 3): the tabulated value when n is
/// listed, otherwise the best applicable 16m+j rule, otherwise the
/// existence dichotomy (k = 1 exactly when n = 3 or n = 4m+2, else k >= 2).
OlhBound olh_factor_bound(int n);

std::string olh_bound_to_json(const OlhBound& bound);

}  // namespace sfd
