#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "sfd/rng.hpp"

using sfd::Rng;
using sfd::RngSeed;

TEST_CASE("identical seeds give identical streams") {
    Rng a(RngSeed{123});
    Rng b(RngSeed{123});
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different seeds diverge") {
    Rng a(RngSeed{1});
    Rng b(RngSeed{2});
    int same = 0;
    for (int i = 0; i < 64; ++i) same += a.next_u64() == b.next_u64();
    CHECK(same < 4);
}

TEST_CASE("uniform01 stays in [0,1) and uniform_open01 in (0,1)") {
    Rng rng(RngSeed{7});
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.uniform01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.uniform_open01();
        CHECK(u > 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("below respects the bound and hits all residues") {
    Rng rng(RngSeed{99});
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 2000; ++i) {
        const std::uint64_t v = rng.below(7);
        CHECK(v < 7);
        seen.insert(v);
    }
    CHECK(seen.size() == 7);
}

TEST_CASE("permutation returns 1..n exactly once") {
    Rng rng(RngSeed{5});
    for (int n : {1, 2, 17, 100}) {
        auto p = rng.permutation(n);
        std::sort(p.begin(), p.end());
        for (int i = 0; i < n; ++i) CHECK(p[static_cast<std::size_t>(i)] == i + 1);
    }
}

TEST_CASE("split streams are independent of parent state and of each other") {
    const Rng parent(RngSeed{42});
    Rng child0a = parent.split(0);
    Rng child0b = parent.split(0);
    Rng child1 = parent.split(1);
    CHECK(child0a.next_u64() == child0b.next_u64());
    CHECK(child0a.seed_value() != child1.seed_value());

    // Consuming the parent does not change what split produces.
    Rng parent2(RngSeed{42});
    parent2.next_u64();
    Rng child0c = parent2.split(0);
    CHECK(child0c.next_u64() == child0b.next_u64());
}
