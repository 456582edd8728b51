// Acceptance suite: runs every toolkit-level criterion end to end and prints
// one PASS/FAIL line per criterion. Exit status is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "sfd/criteria.hpp"
#include "sfd/design.hpp"
#include "sfd/gp.hpp"
#include "sfd/oa.hpp"
#include "sfd/optimize.hpp"
#include "sfd/testbed.hpp"

using namespace sfd;

namespace {

using Clock = std::chrono::steady_clock;

int g_failures = 0;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void report(int criterion, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string data_path(const std::string& name) { return std::string(SFD_DATA_DIR) + "/oa/" + name; }

double median(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

char buffer[512];

// 1. Validity of 1,000 randomized Latin hypercube generations (n <= 200,
//    d <= 20), including the per-coordinate bin bounds, in under 10 s.
void criterion_1() {
    const auto start = Clock::now();
    Rng rng(RngSeed{1001});
    bool ok = true;
    for (int trial = 0; trial < 1000 && ok; ++trial) {
        const int n = 1 + static_cast<int>(rng.below(200));
        const int d = 1 + static_cast<int>(rng.below(20));
        const auto lh = random_latin_hypercube(n, d, RngSeed{rng.next_u64()});
        const auto design = realize(lh);
        ok = ok && validate_latin_hypercube(design, n);
        for (int i = 0; i < n && ok; ++i)
            for (int j = 0; j < d && ok; ++j) {
                const double x = design.points(i, j);
                const int level = lh.levels(i, j);
                ok = x >= (level - 1.0) / n && x < static_cast<double>(level) / n;
            }
    }
    const double elapsed = seconds_since(start);
    std::snprintf(buffer, sizeof(buffer),
                  "1000 random hypercubes valid with in-bin coordinates (%.2fs < 10s)", elapsed);
    report(1, ok && elapsed < 10.0, buffer);
}

// 2. OA(9,3^4,2) ingestion, strength check, and 100 seeded constructions with
//    perfect two-dimensional projections and exact level-bin round-trip, in
//    under 5 s.
void criterion_2() {
    const auto start = Clock::now();
    bool ok = true;
    std::string detail;
    try {
        const auto oa = parse_oa_file(data_path("oa_n9_s3_d4_t2.txt"));
        ok = oa.n() == 9 && oa.d() == 4 && oa.s == 3 && verify_strength(oa, 2);
        for (std::uint64_t seed = 0; seed < 100 && ok; ++seed) {
            const auto design = realize(oa_based_lhd(oa, RngSeed{seed}));
            for (int a = 0; a < 4 && ok; ++a)
                for (int b = a + 1; b < 4 && ok; ++b) {
                    const auto cells = projection_cell_counts(design, {a, b}, 3);
                    for (const int count : cells.counts) ok = ok && count == 1;
                }
            for (int i = 0; i < 9 && ok; ++i)
                for (int j = 0; j < 4 && ok; ++j)
                    ok = static_cast<int>(design.points(i, j) * 3.0) + 1 == oa.rows(i, j);
        }
    } catch (const std::exception& e) {
        ok = false;
        detail = std::string(" (") + e.what() + ")";
    }
    const double elapsed = seconds_since(start);
    std::snprintf(buffer, sizeof(buffer),
                  "OA(9,3^4,2) round-trip over 100 seeds%s (%.2fs < 5s)", detail.c_str(), elapsed);
    report(2, ok && elapsed < 5.0, buffer);
}

// 3. Criterion implementations agree with independently coded brute-force
//    oracles to relative 1e-10 on 50 random designs.
void criterion_3() {
    Rng rng(RngSeed{3003});
    bool ok = true;
    double worst = 0.0;
    const auto check = [&](double got, double want) {
        const double rel = std::abs(got - want) / std::max(1e-300, std::abs(want));
        worst = std::max(worst, rel);
        ok = ok && rel <= 1e-10;
    };
    for (int trial = 0; trial < 50 && ok; ++trial) {
        const int n = 3 + static_cast<int>(rng.below(10));
        const int d = 1 + static_cast<int>(rng.below(4));
        const auto x = realize(random_latin_hypercube(n, d, RngSeed{rng.next_u64()}));

        check(phi_p(x, 2, 15), oracle::phi_p(x, 2, 15));
        check(maxpro(x), oracle::maxpro(x));
        check(min_interpoint_distance(x, 2), oracle::min_dist(x, 2));
        const auto levels = discrepancy_levels(x, n);
        check(centered_l2_discrepancy(levels, n), oracle::centered_l2(levels, n));
        if (d >= 2) {
            check(ard(x, {2}, 1.0), oracle::ard(x, {2}, 1.0));
            check(uniform_projection(levels, n), oracle::uniform_projection(levels, n));
            check(column_correlations(x, CorrelationMode::Average),
                  oracle::avg_abs_correlation(x));
            check(column_correlations(x, CorrelationMode::Maximum),
                  oracle::max_abs_correlation(x));
        }
        if (d == 1) {
            std::vector<double> xs;
            for (int i = 0; i < n; ++i) xs.push_back(x.points(i, 0));
            check(star_discrepancy(x, StarMethod::Exact), oracle::star_1d(xs));
        }
        if (d == 2) check(star_discrepancy(x, StarMethod::Exact), oracle::star_2d(x));
    }
    std::snprintf(buffer, sizeof(buffer),
                  "all criteria match brute-force oracles on 50 designs (worst rel %.2e <= 1e-10)",
                  worst);
    report(3, ok, buffer);
}

// 4. Optimizer efficacy at n = 50, d in {3,6,9}: best of 20 restarts reaches
//    phi_p at most 0.8x the random median and separation at least 1.2x the
//    random median, in under 3 minutes.
void criterion_4() {
    const auto start = Clock::now();
    bool ok = true;
    std::string detail;
    for (const int d : {3, 6, 9}) {
        const auto spec = CriterionSpec::phi_p(2, 50);
        std::vector<double> random_phi, random_mindist;
        for (int r = 0; r < 100; ++r) {
            const auto x = realize(random_latin_hypercube(
                50, d, RngSeed{9000ull + static_cast<std::uint64_t>(100 * d + r)}));
            random_phi.push_back(phi_p(x, 2, 50));
            random_mindist.push_back(min_interpoint_distance(x, 2));
        }
        AnnealSchedule schedule;
        schedule.max_total_moves = 12000;
        const auto result = multi_restart(50, d, spec, 20, schedule,
                                          RngSeed{4000ull + static_cast<std::uint64_t>(d)}, 0);
        const auto best = realize(result.best_design);
        const double best_phi = phi_p(best, 2, 50);
        const double best_mindist = min_interpoint_distance(best, 2);
        const double phi_ratio = best_phi / median(random_phi);
        const double dist_ratio = best_mindist / median(random_mindist);
        if (!(phi_ratio <= 0.8 && dist_ratio >= 1.2)) ok = false;
        char piece[96];
        std::snprintf(piece, sizeof(piece), " d=%d: phi %.2fx dist %.2fx;", d, phi_ratio,
                      dist_ratio);
        detail += piece;
    }
    const double elapsed = seconds_since(start);
    std::snprintf(buffer, sizeof(buffer),
                  "optimized vs random medians (need <=0.8x and >=1.2x):%s (%.1fs < 180s)",
                  detail.c_str(), elapsed);
    report(4, ok && elapsed < 180.0, buffer);
}

// 5. Projection-quality ordering: ARD-, MaxPro-, and UP-optimized 10x4
//    designs have ARD (J={2}, lambda=1) no worse than the phi_p-optimized
//    design in at least 8 of 10 seeded repetitions.
void criterion_5() {
    const std::vector<int> orders{2};
    AnnealSchedule schedule;
    schedule.max_total_moves = 20000;
    int hits = 0;
    for (std::uint64_t rep = 0; rep < 10; ++rep) {
        const auto optimize = [&](const CriterionSpec& spec, std::uint64_t salt) {
            return realize(multi_restart(10, 4, spec, 4, schedule,
                                         RngSeed{5000 + 16 * rep + salt}, 0)
                               .best_design);
        };
        const double ard_phi =
            ard(optimize(CriterionSpec::phi_p(2, 15), 0), orders, 1.0);
        const double ard_ard = ard(optimize(CriterionSpec::ard({2}, 1.0), 1), orders, 1.0);
        const double ard_maxpro = ard(optimize(CriterionSpec::maxpro(), 2), orders, 1.0);
        const double ard_up =
            ard(optimize(CriterionSpec::uniform_projection(), 3), orders, 1.0);
        if (ard_ard <= ard_phi && ard_maxpro <= ard_phi && ard_up <= ard_phi) ++hits;
    }
    std::snprintf(buffer, sizeof(buffer),
                  "ARD/MaxPro/UP designs beat the phi_p design on ARD in %d/10 repetitions "
                  "(need >= 8)",
                  hits);
    report(5, hits >= 8, buffer);
}

// 6. Interpolation: with a pinned zero nugget on 30-point designs, every
//    simulator is reproduced at its training points to 1e-6, and adding a
//    constant shifts predictions exactly (to 1e-9).
void criterion_6() {
    bool ok = true;
    std::string detail;
    for (const auto& sim : simulators()) {
        const auto x = realize(random_latin_hypercube(30, sim.dimension,
                                                      RngSeed{600 + sim.dimension}));
        const Eigen::VectorXd y = eval_simulator(sim.name, x);
        FitConfig config;
        config.fixed_eta = 0.0;
        config.seed = RngSeed{66};
        double max_err = 0.0;
        double shift_err = 0.0;
        try {
            const auto model = fit(x, y, KernelFamily::Matern32, config);
            for (int i = 0; i < 30; ++i)
                max_err = std::max(max_err,
                                   std::abs(predict_mean(model, x.points.row(i)) - y[i]));
            const double c = 7.25;
            const auto shifted = fit(x, Eigen::VectorXd(y.array() + c), KernelFamily::Matern32,
                                     config);
            for (int i = 0; i < 5; ++i) {
                const auto q = x.points.row(i);
                shift_err = std::max(shift_err, std::abs(predict_mean(shifted, q) -
                                                         predict_mean(model, q) - c));
            }
        } catch (const std::exception&) {
            ok = false;
        }
        if (!(max_err < 1e-6 && shift_err < 1e-9)) ok = false;
        char piece[96];
        std::snprintf(piece, sizeof(piece), " %s: %.1e/%.1e;", sim.name.c_str(), max_err,
                      shift_err);
        detail += piece;
    }
    std::snprintf(buffer, sizeof(buffer),
                  "zero-nugget interpolation (<1e-6) and +c equivariance (<1e-9):%s",
                  detail.c_str());
    report(6, ok, buffer);
}

// 7. Desk-scale benchmark: Friedman, n in {50,100}, N = 2000, 10 replicates,
//    four methods; all mean RMSPEs finite and every optimized method within
//    1.5x of the best, in under 15 minutes.
void criterion_7() {
    const auto start = Clock::now();
    BenchmarkConfig config;
    config.simulator = "friedman";
    config.methods = {"random-lhd", "maximin", "maxpro", "up"};
    config.run_sizes = {50, 100};
    config.replicates = 10;
    config.test_set_size = 2000;
    config.seed = RngSeed{7007};
    config.method_config.opt_restarts = 2;
    config.method_config.opt_max_moves = 8000;
    bool ok = true;
    std::string detail;
    try {
        const auto report_data = run_benchmark(config);
        for (const int n : config.run_sizes) {
            std::map<std::string, double> means;
            for (const auto& agg : report_data.aggregates)
                if (agg.n == n) means[agg.method] = agg.mean_rmspe;
            double best = std::numeric_limits<double>::infinity();
            for (const auto& [method, mean] : means) {
                if (!std::isfinite(mean)) ok = false;
                best = std::min(best, mean);
            }
            for (const auto& method : {"maximin", "maxpro", "up"}) {
                const double ratio = means[method] / best;
                if (!(ratio <= 1.5)) ok = false;
                char piece[64];
                std::snprintf(piece, sizeof(piece), " n=%d %s %.2fx;", n, method, ratio);
                detail += piece;
            }
        }
    } catch (const std::exception& e) {
        ok = false;
        detail = std::string(" (") + e.what() + ")";
    }
    const double elapsed = seconds_since(start);
    std::snprintf(buffer, sizeof(buffer),
                  "Friedman benchmark, optimized methods within 1.5x of best:%s (%.0fs < 900s)",
                  detail.c_str(), elapsed);
    report(7, ok && elapsed < 900.0, buffer);
}

// 8. Producing 100 UP- and 100 ARD-optimized designs at n = 100, d = 6 each
//    takes under half the wall time of 100 MaxPro-optimized designs at an
//    equal move budget.
void criterion_8() {
    AnnealSchedule schedule;
    schedule.max_total_moves = 2000;
    const auto produce = [&](const CriterionSpec& spec, std::uint64_t seed) {
        const auto start = Clock::now();
        multi_restart(100, 6, spec, 100, schedule, RngSeed{seed}, 1);
        return seconds_since(start);
    };
    const double up_time = produce(CriterionSpec::uniform_projection(), 81);
    const double ard_time = produce(CriterionSpec::ard({2}, 1.0), 82);
    const double maxpro_time = produce(CriterionSpec::maxpro(), 83);
    const bool ok = up_time < 0.5 * maxpro_time && ard_time < 0.5 * maxpro_time;
    std::snprintf(buffer, sizeof(buffer),
                  "100-design wall times: up %.2fs, ard %.2fs vs maxpro %.2fs (need < 0.5x)",
                  up_time, ard_time, maxpro_time);
    report(8, ok, buffer);
}

// 9. The factor-bound table reproduces every published entry and the
//    n = 4m + 2 rule.
void criterion_9() {
    const std::map<int, int> expected = {
        {4, 2},    {5, 2},    {7, 3},    {8, 4},    {9, 5},    {11, 7},   {12, 6},  {13, 6},
        {15, 6},   {16, 12},  {17, 6},   {19, 6},   {20, 6},   {21, 6},   {23, 6},  {24, 6},
        {25, 12},  {27, 12},  {32, 24},  {33, 16},  {48, 12},  {49, 24},  {64, 48}, {65, 32},
        {80, 12},  {81, 50},  {96, 24},  {97, 24},  {112, 12}, {113, 12}, {121, 84},
        {125, 58}, {128, 96}, {129, 64}, {144, 24}, {145, 12}, {160, 24}, {161, 24},
        {169, 84}, {176, 12}, {177, 12}, {192, 48}, {193, 48}, {208, 12}, {209, 12},
        {224, 24}, {225, 24}, {240, 12}, {241, 12}, {243, 80}, {256, 248}, {343, 168},
        {512, 496}};
    bool ok = true;
    for (const auto& [n, k] : expected) {
        const auto bound = olh_factor_bound(n);
        if (bound.k_lower_bound != k || !bound.tabulated) ok = false;
    }
    for (int n = 6; n <= 510; n += 4)
        if (olh_factor_bound(n).k_lower_bound != 1) ok = false;
    const bool spot = olh_factor_bound(16).k_lower_bound == 12 &&
                      olh_factor_bound(11).k_lower_bound == 7 &&
                      olh_factor_bound(81).k_lower_bound == 50 &&
                      olh_factor_bound(256).k_lower_bound == 248 &&
                      olh_factor_bound(512).k_lower_bound == 496;
    std::snprintf(buffer, sizeof(buffer),
                  "all %zu tabulated bounds exact; k = 1 on every n = 4m + 2", expected.size());
    report(9, ok && spot, buffer);
}

// 10. Halton at n = 64, d = 2 has a smaller Monte-Carlo star-discrepancy
//     estimate than the mean over 20 uniform-random designs.
void criterion_10() {
    const int budget = 4096;
    const auto halton = halton_sequence(64, 2);
    const double halton_star =
        star_discrepancy(halton, StarMethod::MonteCarlo, budget, RngSeed{1010});
    double total = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto random = uniform_random_design(64, 2, RngSeed{2000 + seed});
        total += star_discrepancy(random, StarMethod::MonteCarlo, budget, RngSeed{1010});
    }
    const double random_mean = total / 20.0;
    std::snprintf(buffer, sizeof(buffer),
                  "Halton star estimate %.4f < uniform-random mean %.4f", halton_star,
                  random_mean);
    report(10, halton_star < random_mean, buffer);
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    std::printf("%d/10 criteria passed\n", 10 - g_failures);
    return g_failures;
}
