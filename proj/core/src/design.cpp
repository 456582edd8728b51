#include "sfd/design.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace sfd {

LatinHypercube random_latin_hypercube(int n, int d, RngSeed seed, bool midpoint) {
    if (n < 1 || d < 1) {
        throw std::invalid_argument("random_latin_hypercube: n and d must be >= 1");
    }
    Rng rng(seed);
    LatinHypercube lh;
    lh.levels.resize(n, d);
    lh.jitter.resize(n, d);
    for (int j = 0; j < d; ++j) {
        const std::vector<int> perm = rng.permutation(n);
        for (int i = 0; i < n; ++i) lh.levels(i, j) = perm[static_cast<std::size_t>(i)];
    }
    if (midpoint) {
        lh.jitter.setConstant(0.5);
    } else {
        for (int j = 0; j < d; ++j)
            for (int i = 0; i < n; ++i) lh.jitter(i, j) = rng.uniform_open01();
    }
    return lh;
}

LatinHypercube midpoint_latin_hypercube(Eigen::MatrixXi levels) {
    LatinHypercube lh;
    lh.jitter = Eigen::MatrixXd::Constant(levels.rows(), levels.cols(), 0.5);
    lh.levels = std::move(levels);
    return lh;
}

Design realize(const LatinHypercube& lh) {
    const int n = lh.n();
    const int d = lh.d();
    Design design;
    design.points.resize(n, d);
    for (int j = 0; j < d; ++j)
        for (int i = 0; i < n; ++i)
            design.points(i, j) = (lh.levels(i, j) - lh.jitter(i, j)) / n;
    return design;
}

bool validate_latin_hypercube(const Design& design, int n_levels) {
    if (n_levels != design.n()) {
        throw std::invalid_argument("validate_latin_hypercube: n_levels must equal the run count");
    }
    const int n = design.n();
    std::vector<char> seen(static_cast<std::size_t>(n));
    for (int j = 0; j < design.d(); ++j) {
        std::fill(seen.begin(), seen.end(), 0);
        for (int i = 0; i < n; ++i) {
            const double x = design.points(i, j);
            if (!(x >= 0.0 && x < 1.0)) return false;
            const int bin = static_cast<int>(std::floor(x * n));
            if (bin < 0 || bin >= n || seen[static_cast<std::size_t>(bin)]) return false;
            seen[static_cast<std::size_t>(bin)] = 1;
        }
    }
    return true;
}

LatinHypercube latin_hypercube_from_design(const Design& design) {
    if (!validate_latin_hypercube(design, design.n())) {
        throw std::invalid_argument("latin_hypercube_from_design: design is not a Latin hypercube");
    }
    const int n = design.n();
    LatinHypercube lh;
    lh.levels.resize(n, design.d());
    lh.jitter.resize(n, design.d());
    for (int j = 0; j < design.d(); ++j) {
        for (int i = 0; i < n; ++i) {
            const double x = design.points(i, j);
            const int level = static_cast<int>(std::floor(x * n)) + 1;
            lh.levels(i, j) = level;
            lh.jitter(i, j) = level - x * n;
        }
    }
    return lh;
}

namespace {

// First 64 primes; Halton bases for dimensions 1..64.
constexpr int kPrimes[64] = {
    2,   3,   5,   7,   11,  13,  17,  19,  23,  29,  31,  37,  41,  43,  47,  53,
    59,  61,  67,  71,  73,  79,  83,  89,  97,  101, 103, 107, 109, 113, 127, 131,
    137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191, 193, 197, 199, 211, 223,
    227, 229, 233, 239, 241, 251, 257, 263, 269, 271, 277, 281, 283, 293, 307, 311};

double radical_inverse(std::uint64_t index, int base) {
    double inv = 1.0 / base;
    double factor = inv;
    double x = 0.0;
    while (index != 0) {
        x += static_cast<double>(index % static_cast<std::uint64_t>(base)) * factor;
        index /= static_cast<std::uint64_t>(base);
        factor *= inv;
    }
    return x;
}

}  // namespace

Design halton_sequence(int n, int d, std::uint64_t skip) {
    if (n < 1 || d < 1) throw std::invalid_argument("halton_sequence: n and d must be >= 1");
    if (d > 64) throw std::invalid_argument("halton_sequence: dimension above 64 is unsupported");
    Design design;
    design.points.resize(n, d);
    for (int i = 0; i < n; ++i) {
        const std::uint64_t index = skip + static_cast<std::uint64_t>(i) + 1;
        for (int j = 0; j < d; ++j) design.points(i, j) = radical_inverse(index, kPrimes[j]);
    }
    return design;
}

Design uniform_random_design(int n, int d, RngSeed seed) {
    if (n < 1 || d < 1) throw std::invalid_argument("uniform_random_design: n and d must be >= 1");
    Rng rng(seed);
    Design design;
    design.points.resize(n, d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) design.points(i, j) = rng.uniform01();
    return design;
}

}  // namespace sfd
