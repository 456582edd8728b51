#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "sfd/csv.hpp"
#include "sfd/design.hpp"
#include "sfd/errors.hpp"

using namespace sfd;

TEST_CASE("n=1 d=1 hypercube is the only possible one") {
    const auto lh = random_latin_hypercube(1, 1, RngSeed{9}, /*midpoint=*/true);
    CHECK(lh.levels(0, 0) == 1);
    CHECK(lh.jitter(0, 0) == 0.5);
    const auto design = realize(lh);
    CHECK(design.points(0, 0) == doctest::Approx(0.5 / 1.0));
}

TEST_CASE("each column of a 7x3 hypercube is a permutation of 1..7") {
    const auto lh = random_latin_hypercube(7, 3, RngSeed{2024});
    for (int j = 0; j < 3; ++j) {
        std::vector<int> col;
        for (int i = 0; i < 7; ++i) col.push_back(lh.levels(i, j));
        std::sort(col.begin(), col.end());
        for (int i = 0; i < 7; ++i) CHECK(col[static_cast<std::size_t>(i)] == i + 1);
    }
}

TEST_CASE("generation is deterministic in the seed") {
    const auto a = random_latin_hypercube(5, 2, RngSeed{42});
    const auto b = random_latin_hypercube(5, 2, RngSeed{42});
    CHECK(a.levels == b.levels);
    CHECK(a.jitter == b.jitter);
    const auto c = random_latin_hypercube(5, 2, RngSeed{43});
    CHECK(a.levels != c.levels);
}

TEST_CASE("invalid sizes are rejected") {
    CHECK_THROWS_AS(random_latin_hypercube(0, 3, RngSeed{1}), std::invalid_argument);
    CHECK_THROWS_AS(random_latin_hypercube(3, 0, RngSeed{1}), std::invalid_argument);
}

TEST_CASE("realize applies x = (l - u)/n") {
    LatinHypercube lh;
    lh.levels.resize(7, 1);
    lh.jitter = Eigen::MatrixXd::Constant(7, 1, 0.5);
    lh.levels << 4, 5, 3, 2, 1, 7, 6;
    const auto design = realize(lh);
    CHECK(design.points(0, 0) == doctest::Approx(0.5).epsilon(1e-12));            // (4-0.5)/7
    CHECK(design.points(4, 0) == doctest::Approx(0.5 / 7.0).epsilon(1e-12));      // (1-0.5)/7
}

TEST_CASE("midpoint realization puts one point per axis bin") {
    const auto lh = random_latin_hypercube(7, 3, RngSeed{11}, /*midpoint=*/true);
    const auto design = realize(lh);
    CHECK(validate_latin_hypercube(design, 7));
    // every coordinate is an odd multiple of 1/(2n)
    for (int i = 0; i < 7; ++i)
        for (int j = 0; j < 3; ++j) {
            const double scaled = design.points(i, j) * 14.0;
            CHECK(std::abs(scaled - std::round(scaled)) < 1e-12);
            CHECK(static_cast<long long>(std::round(scaled)) % 2 == 1);
        }
}

TEST_CASE("random hypercubes realize into valid designs with in-bin coordinates") {
    Rng rng(RngSeed{314});
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + static_cast<int>(rng.below(40));
        const int d = 1 + static_cast<int>(rng.below(6));
        const auto lh = random_latin_hypercube(n, d, RngSeed{rng.next_u64()});
        const auto design = realize(lh);
        CHECK(validate_latin_hypercube(design, n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < d; ++j) {
                const double x = design.points(i, j);
                const int level = lh.levels(i, j);
                CHECK(x >= (level - 1.0) / n);
                CHECK(x < static_cast<double>(level) / n);
            }
    }
}

TEST_CASE("dropping a column keeps the hypercube valid") {
    const auto lh = random_latin_hypercube(12, 4, RngSeed{77});
    const auto design = realize(lh);
    for (int drop = 0; drop < 4; ++drop) {
        Design reduced;
        reduced.points.resize(12, 3);
        int out = 0;
        for (int j = 0; j < 4; ++j) {
            if (j == drop) continue;
            reduced.points.col(out++) = design.points.col(j);
        }
        CHECK(validate_latin_hypercube(reduced, 12));
    }
}

TEST_CASE("validate rejects a shared bin and a mismatched level count") {
    Design design;
    design.points.resize(2, 1);
    design.points << 0.1, 0.3;  // both in bin [0, 0.5) at n=2
    CHECK_FALSE(validate_latin_hypercube(design, 2));
    CHECK_THROWS_AS(validate_latin_hypercube(design, 3), std::invalid_argument);

    Design single;
    single.points.resize(1, 1);
    single.points << 0.37;
    CHECK(validate_latin_hypercube(single, 1));
}

TEST_CASE("hypercube reconstruction inverts realize") {
    const auto lh = random_latin_hypercube(9, 3, RngSeed{5});
    const auto back = latin_hypercube_from_design(realize(lh));
    CHECK(back.levels == lh.levels);
    CHECK((back.jitter - lh.jitter).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("halton radical inverses match hand values") {
    const auto h1 = halton_sequence(3, 1);
    CHECK(h1.points(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(h1.points(1, 0) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(h1.points(2, 0) == doctest::Approx(0.75).epsilon(1e-15));

    const auto h2 = halton_sequence(2, 2);
    CHECK(h2.points(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(h2.points(0, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(h2.points(1, 0) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(h2.points(1, 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));

    const auto single = halton_sequence(1, 1);
    CHECK(single.points(0, 0) == doctest::Approx(0.5));
}

TEST_CASE("halton skip offsets the index and entries stay in (0,1)") {
    const auto all = halton_sequence(10, 3);
    const auto tail = halton_sequence(4, 3, /*skip=*/6);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 3; ++j) CHECK(tail.points(i, j) == all.points(i + 6, j));
    CHECK((all.points.array() > 0.0).all());
    CHECK((all.points.array() < 1.0).all());
}

TEST_CASE("halton dimension limit") {
    CHECK_NOTHROW(halton_sequence(2, 64));
    CHECK_THROWS_AS(halton_sequence(2, 65), std::invalid_argument);
}

TEST_CASE("design CSV round-trips exactly") {
    const auto design = realize(random_latin_hypercube(8, 3, RngSeed{21}));
    std::stringstream buffer;
    CsvMeta meta;
    meta.add("seed", "21");
    write_design_csv(buffer, design, meta);
    const auto back = read_design_csv(buffer);
    CHECK(back.points == design.points);
}

TEST_CASE("levels CSV round-trips and bad rows raise ParseError") {
    const auto lh = random_latin_hypercube(6, 2, RngSeed{3});
    std::stringstream buffer;
    write_levels_csv(buffer, lh.levels);
    CHECK(read_levels_csv(buffer) == lh.levels);

    std::stringstream broken("x1,x2\n1,2\n3\n");
    CHECK_THROWS_AS(read_levels_csv(broken), ParseError);
}
