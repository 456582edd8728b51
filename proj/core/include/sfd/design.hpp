#pragma once

#include <Eigen/Dense>

#include "sfd/rng.hpp"

namespace sfd {

/// An n x d design on [0,1)^d. Rows are runs, columns are input factors.
struct Design {
    Eigen::MatrixXd points;

    int n() const noexcept { return static_cast<int>(points.rows()); }
    int d() const noexcept { return static_cast<int>(points.cols()); }
};

/// A Latin hypercube: each column of `levels` is a permutation of 1..n, and
/// `jitter` holds the within-bin offsets u_ij in (0,1] that map levels to
/// design points via x_ij = (l_ij - u_ij) / n. Midpoint hypercubes use
/// u_ij = 1/2 everywhere.
struct LatinHypercube {
    Eigen::MatrixXi levels;
    Eigen::MatrixXd jitter;

    int n() const noexcept { return static_cast<int>(levels.rows()); }
    int d() const noexcept { return static_cast<int>(levels.cols()); }
};

/// Sample a random Latin hypercube: every column an independent uniform
/// permutation of 1..n, jitter i.i.d. uniform on (0,1) (or the constant 1/2
/// when `midpoint`). Deterministic given the seed.
///
/// Throws std::invalid_argument for n = 0 or d = 0.
LatinHypercube random_latin_hypercube(int n, int d, RngSeed seed, bool midpoint = false);

/// Midpoint hypercube over the given level matrix (u = 1/2 everywhere).
LatinHypercube midpoint_latin_hypercube(Eigen::MatrixXi levels);

/// Map a Latin hypercube to its design: x_ij = (l_ij - u_ij) / n, which puts
/// x_ij inside the half-open bin [(l_ij - 1)/n, l_ij/n).
Design realize(const LatinHypercube& lh);

/// True iff every column of `design`, binned at `n_levels` equal intervals,
/// occupies each bin exactly once. Throws std::invalid_argument when
/// n_levels differs from the run count.
bool validate_latin_hypercube(const Design& design, int n_levels);

/// Recover the (levels, jitter) pair of a design that passes
/// validate_latin_hypercube at its own run count. Throws
/// std::invalid_argument otherwise.
LatinHypercube latin_hypercube_from_design(const Design& design);

/// First n Halton points after `skip`, bases = the first d primes; entries in
/// (0,1). Supports d <= 64; larger d throws std::invalid_argument.
Design halton_sequence(int n, int d, std::uint64_t skip = 0);

/// n i.i.d. uniform points in [0,1)^d.
Design uniform_random_design(int n, int d, RngSeed seed);

}  // namespace sfd
