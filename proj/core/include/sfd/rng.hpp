#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace sfd {

/// Seed for the toolkit's deterministic random streams. The same seed always
/// produces bit-identical results on every platform.
struct RngSeed {
    std::uint64_t value = 0;
};

namespace detail {

/// SplitMix64 finalizer (Steele, Lea, Flood 2014). Used for seeding and for
/// deriving independent sub-streams.
inline constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t splitmix64_next(std::uint64_t& state) noexcept {
    state += 0x9e3779b97f4a7c15ULL;
    return splitmix64_mix(state);
}

inline constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
}

}  // namespace detail

/// xoshiro256** generator (Blackman & Vigna), seeded through SplitMix64.
///
/// Unlike std::shuffle / std::uniform_real_distribution, every method here is
/// fully specified, so streams are reproducible across compilers and standard
/// libraries.
///
/// Stream splitting: `split(k)` derives the child seed as
/// `splitmix64_mix(seed ^ (k + 1) * 0x9e3779b97f4a7c15)`, giving independent
/// generators for sub-tasks (restart index, replicate index, ...) without
/// consuming state from the parent.
class Rng {
public:
    explicit Rng(RngSeed seed) : seed_(seed.value) {
        std::uint64_t sm = seed.value;
        for (auto& w : state_) w = detail::splitmix64_next(sm);
    }

    std::uint64_t next_u64() noexcept {
        const std::uint64_t result = detail::rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = detail::rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0,1), 53 random bits.
    double uniform01() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in (0,1); rejects the (probability 2^-53) exact zero.
    double uniform_open01() noexcept {
        double u;
        do {
            u = uniform01();
        } while (u == 0.0);
        return u;
    }

    /// Unbiased integer in [0, bound) via Lemire's multiply-reject method.
    std::uint64_t below(std::uint64_t bound) noexcept {
        __uint128_t m = static_cast<__uint128_t>(next_u64()) * bound;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (lo < threshold) {
                m = static_cast<__uint128_t>(next_u64()) * bound;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    /// Uniform int in [lo, hi] inclusive.
    int uniform_int(int lo, int hi) noexcept {
        return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    /// Derive an independent child generator for sub-stream `stream`.
    Rng split(std::uint64_t stream) const noexcept {
        const std::uint64_t child =
            detail::splitmix64_mix(seed_ ^ (stream + 1) * 0x9e3779b97f4a7c15ULL);
        return Rng(RngSeed{child});
    }

    /// In-place Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::span<T> items) noexcept {
        for (std::size_t i = items.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

    /// Uniform random permutation of 1..n.
    std::vector<int> permutation(int n) {
        std::vector<int> p(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = i + 1;
        shuffle(std::span<int>(p));
        return p;
    }

    std::uint64_t seed_value() const noexcept { return seed_; }

private:
    std::uint64_t seed_;
    std::uint64_t state_[4]{};
};

}  // namespace sfd
