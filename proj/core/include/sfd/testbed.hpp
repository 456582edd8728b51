#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "sfd/design.hpp"
#include "sfd/gp.hpp"
#include "sfd/rng.hpp"

namespace sfd {

/// A deterministic test-function simulator on [0,1]^d.
struct Simulator {
    std::string name;
    int dimension = 0;
    std::function<double(const Eigen::RowVectorXd&)> fn;
};

const std::vector<Simulator>& simulators();
const Simulator& find_simulator(const std::string& name);

/// Evaluate the named simulator at a point of the unit cube. Throws
/// NotFoundError for an unknown name and std::invalid_argument when x leaves
/// [0,1]^d or has the wrong dimension.
double eval_simulator(const std::string& name,
                      const Eigen::Ref<const Eigen::RowVectorXd, 0, Eigen::InnerStride<>>& x);

/// Simulator outputs for every row of the design.
Eigen::VectorXd eval_simulator(const std::string& name, const Design& design);

/// Root mean squared prediction error of the model against the simulator
/// over the test set.
double rmspe(const GPModel& model, const std::string& simulator, const Design& test_set);

/// Design-generation methods available to the benchmark and the CLI:
/// random-lhd, halton, maximin (phi_p-optimized), maxpro, up, ard, oa-lhd.
std::vector<std::string> design_method_names();

struct MethodConfig {
    int opt_restarts = 4;
    long long opt_max_moves = 20000;
    std::string oa_file;  // required by oa-lhd
    int threads = 1;
};

/// Generate an n x d design by the named method. Optimized methods run a
/// multi-restart anneal under the method's criterion. oa-lhd ingests the
/// configured array file, which fixes both n and d; a mismatch is a
/// ConfigError naming the gap.
Design make_design_by_method(const std::string& method, int n, int d, RngSeed seed,
                             const MethodConfig& config = {});

struct BenchmarkConfig {
    std::string simulator = "friedman";
    std::vector<std::string> methods{"random-lhd"};
    std::vector<int> run_sizes{50};
    int replicates = 1;
    int test_set_size = 1000;  // N: size of the fresh random-LHD test set
    RngSeed seed{0};
    KernelFamily kernel = KernelFamily::Matern32;
    FitConfig gp;  // estimated nugget with the 1e-8 floor by default
    MethodConfig method_config;
    int threads = 0;
};

struct BenchmarkRow {
    std::string method;
    int n = 0;
    int replicate = 0;
    double rmspe = 0.0;
    double log_rmspe = 0.0;
    double design_time_s = 0.0;
    double fit_time_s = 0.0;
    std::uint64_t seed = 0;
};

struct BenchmarkAggregate {
    std::string method;
    int n = 0;
    double mean_log_rmspe = 0.0;
    double sd_log_rmspe = 0.0;
    double mean_rmspe = 0.0;
    double total_design_time_s = 0.0;
    double total_fit_time_s = 0.0;
};

struct BenchmarkReport {
    BenchmarkConfig config;
    std::vector<BenchmarkRow> rows;
    std::vector<BenchmarkAggregate> aggregates;
};

/// Per (method, run size, replicate): generate the design with a derived
/// seed, evaluate the simulator, fit the GP, and score RMSPE against a fresh
/// random-LHD test set of N points. Replicates run concurrently; rows and
/// aggregates assemble deterministically.
BenchmarkReport run_benchmark(const BenchmarkConfig& config);

std::vector<BenchmarkAggregate> compute_aggregates(const BenchmarkConfig& config,
                                                   const std::vector<BenchmarkRow>& rows);

/// Full report as JSON. `include_timing` = false gives the
/// timing-independent view (useful for determinism checks).
std::string benchmark_report_to_json(const BenchmarkReport& report, bool include_timing = true);

/// Aggregate timing table: one row per run size, one column of design
/// seconds per method.
void write_benchmark_timing_csv(std::ostream& out, const BenchmarkReport& report);

}  // namespace sfd
