#include "sfd/testbed.hpp"

#include <chrono>
#include <cmath>
#include <exception>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "sfd/criteria.hpp"
#include "sfd/errors.hpp"
#include "sfd/oa.hpp"
#include "sfd/optimize.hpp"
#include "parallel_util.hpp"

namespace sfd {

namespace {

double detpep10(const Eigen::RowVectorXd& x) {
    return 100.0 * (std::exp(-2.0 / std::pow(x[0], 1.75)) + std::exp(-2.0 / std::pow(x[1], 1.5)) +
                    std::exp(-2.0 / std::pow(x[2], 1.25)));
}

double friedman(const Eigen::RowVectorXd& x) {
    return 10.0 * std::sin(std::numbers::pi * x[0] * x[1]) + 20.0 * (x[2] - 0.5) * (x[2] - 0.5) +
           10.0 * x[3] + 5.0 * x[4];
}

double gramacy_lee(const Eigen::RowVectorXd& x) {
    return std::exp(std::sin(std::pow(0.9 * (x[0] + 0.48), 10.0))) + x[1] * x[2] + x[3];
}

double bratley(const Eigen::RowVectorXd& x) {
    double sum = 0.0;
    double prod = 1.0;
    double sign = -1.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        prod *= x[i];
        sum += sign * prod;
        sign = -sign;
    }
    return sum;
}

// Four-segment planar arm: angles are 2*pi*x_1..4, lengths are x_5..8; the
// output is the distance of the end effector from the shoulder.
double robot_arm(const Eigen::RowVectorXd& x) {
    double angle = 0.0;
    double u = 0.0;
    double v = 0.0;
    for (int i = 0; i < 4; ++i) {
        angle += 2.0 * std::numbers::pi * x[i];
        u += x[4 + i] * std::cos(angle);
        v += x[4 + i] * std::sin(angle);
    }
    return std::sqrt(u * u + v * v);
}

}  // namespace

const std::vector<Simulator>& simulators() {
    static const std::vector<Simulator> all = {
        {"detpep10", 3, detpep10},
        {"friedman", 5, friedman},
        {"gramacylee", 6, gramacy_lee},
        {"bratley", 9, bratley},
        {"robotarm", 8, robot_arm},
    };
    return all;
}

const Simulator& find_simulator(const std::string& name) {
    for (const auto& sim : simulators())
        if (sim.name == name) return sim;
    throw NotFoundError("unknown simulator: " + name);
}

double eval_simulator(const std::string& name,
                      const Eigen::Ref<const Eigen::RowVectorXd, 0, Eigen::InnerStride<>>& x) {
    const Simulator& sim = find_simulator(name);
    if (static_cast<int>(x.size()) != sim.dimension)
        throw std::invalid_argument("eval_simulator: " + name + " expects dimension " +
                                    std::to_string(sim.dimension));
    if ((x.array() < 0.0).any() || (x.array() > 1.0).any())
        throw std::invalid_argument("eval_simulator: input outside [0,1]^d");
    return sim.fn(x);
}

Eigen::VectorXd eval_simulator(const std::string& name, const Design& design) {
    Eigen::VectorXd y(design.n());
    for (int i = 0; i < design.n(); ++i) y[i] = eval_simulator(name, design.points.row(i));
    return y;
}

double rmspe(const GPModel& model, const std::string& simulator, const Design& test_set) {
    if (test_set.n() < 1) throw std::invalid_argument("rmspe: empty test set");
    double sum_sq = 0.0;
    for (int i = 0; i < test_set.n(); ++i) {
        const double predicted = predict_mean(model, test_set.points.row(i));
        const double truth = eval_simulator(simulator, test_set.points.row(i));
        const double err = predicted - truth;
        sum_sq += err * err;
    }
    return std::sqrt(sum_sq / test_set.n());
}

std::vector<std::string> design_method_names() {
    return {"random-lhd", "halton", "maximin", "maxpro", "up", "ard", "oa-lhd"};
}

namespace {

AnnealSchedule method_schedule(long long max_moves) {
    AnnealSchedule schedule;
    schedule.max_total_moves = max_moves;
    return schedule;
}

Design optimized_design(const CriterionSpec& spec, int n, int d, RngSeed seed,
                        const MethodConfig& config) {
    const SearchResult result = multi_restart(n, d, spec, config.opt_restarts,
                                              method_schedule(config.opt_max_moves), seed,
                                              config.threads);
    return realize(result.best_design);
}

}  // namespace

Design make_design_by_method(const std::string& method, int n, int d, RngSeed seed,
                             const MethodConfig& config) {
    if (method == "random-lhd") return realize(random_latin_hypercube(n, d, seed));
    if (method == "halton") return halton_sequence(n, d);
    if (method == "maximin")
        return optimized_design(CriterionSpec::phi_p(2, default_phi_p_exponent(n)), n, d, seed,
                                config);
    if (method == "maxpro") return optimized_design(CriterionSpec::maxpro(), n, d, seed, config);
    if (method == "up") return optimized_design(CriterionSpec::uniform_projection(), n, d, seed, config);
    if (method == "ard") return optimized_design(CriterionSpec::ard(), n, d, seed, config);
    if (method == "oa-lhd") {
        if (config.oa_file.empty())
            throw ConfigError("method 'oa-lhd' needs an orthogonal array file; none was configured");
        const OrthogonalArray oa = parse_oa_file(config.oa_file);
        if (oa.n() != n)
            throw ConfigError("method 'oa-lhd': array " + config.oa_file + " has " +
                              std::to_string(oa.n()) + " runs but the benchmark asked for " +
                              std::to_string(n));
        if (oa.d() != d)
            throw ConfigError("method 'oa-lhd': array " + config.oa_file + " has " +
                              std::to_string(oa.d()) + " factors but the benchmark asked for " +
                              std::to_string(d));
        return realize(oa_based_lhd(oa, seed));
    }
    throw NotFoundError("unknown design method: " + method);
}

namespace {

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

BenchmarkReport run_benchmark(const BenchmarkConfig& config) {
    if (config.replicates < 1) throw std::invalid_argument("run_benchmark: replicates >= 1");
    if (config.test_set_size < 1) throw std::invalid_argument("run_benchmark: test_set_size >= 1");
    const Simulator& sim = find_simulator(config.simulator);
    const int d = sim.dimension;
    for (const auto& method : config.methods) {
        // Validate names (and OA availability) before spending any time.
        bool known = false;
        for (const auto& name : design_method_names()) known = known || name == method;
        if (!known) throw NotFoundError("unknown design method: " + method);
        if (method == "oa-lhd" && config.method_config.oa_file.empty())
            throw ConfigError("method 'oa-lhd' needs an orthogonal array file; none was configured");
    }

    const int n_methods = static_cast<int>(config.methods.size());
    const int n_sizes = static_cast<int>(config.run_sizes.size());
    const int total = n_methods * n_sizes * config.replicates;

    BenchmarkReport report;
    report.config = config;
    report.rows.resize(static_cast<std::size_t>(total));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(total));

    const Rng base(config.seed);
    detail::parallel_for(total, config.threads, [&](int task) {
        try {
            const int mi = task / (n_sizes * config.replicates);
            const int rest = task % (n_sizes * config.replicates);
            const int ni = rest / config.replicates;
            const int replicate = rest % config.replicates;
            const std::string& method = config.methods[static_cast<std::size_t>(mi)];
            const int n = config.run_sizes[static_cast<std::size_t>(ni)];

            const Rng stream = base.split(static_cast<std::uint64_t>(task));
            const RngSeed design_seed{stream.split(0).seed_value()};
            const RngSeed test_seed{stream.split(1).seed_value()};
            const RngSeed fit_seed{stream.split(2).seed_value()};

            MethodConfig method_config = config.method_config;
            method_config.threads = 1;  // replicates already run in parallel

            auto t0 = std::chrono::steady_clock::now();
            const Design design = make_design_by_method(method, n, d, design_seed, method_config);
            const double design_time = elapsed_seconds(t0);

            const Eigen::VectorXd y = eval_simulator(config.simulator, design);
            FitConfig gp = config.gp;
            gp.seed = fit_seed;
            t0 = std::chrono::steady_clock::now();
            const GPModel model = fit(design, y, config.kernel, gp);
            const double fit_time = elapsed_seconds(t0);

            const Design test_set =
                realize(random_latin_hypercube(config.test_set_size, d, test_seed));
            const double err = rmspe(model, config.simulator, test_set);

            BenchmarkRow row;
            row.method = method;
            row.n = n;
            row.replicate = replicate;
            row.rmspe = err;
            row.log_rmspe = std::log(std::max(err, 1e-300));
            row.design_time_s = design_time;
            row.fit_time_s = fit_time;
            row.seed = stream.seed_value();
            report.rows[static_cast<std::size_t>(task)] = std::move(row);
        } catch (...) {
            errors[static_cast<std::size_t>(task)] = std::current_exception();
        }
    });
    for (const auto& error : errors)
        if (error) std::rethrow_exception(error);

    report.aggregates = compute_aggregates(config, report.rows);
    return report;
}

std::vector<BenchmarkAggregate> compute_aggregates(const BenchmarkConfig& config,
                                                   const std::vector<BenchmarkRow>& rows) {
    std::vector<BenchmarkAggregate> aggregates;
    for (const auto& method : config.methods) {
        for (const int n : config.run_sizes) {
            BenchmarkAggregate agg;
            agg.method = method;
            agg.n = n;
            int count = 0;
            double sum_log = 0.0;
            double sum_rmspe = 0.0;
            for (const auto& row : rows) {
                if (row.method != method || row.n != n) continue;
                ++count;
                sum_log += row.log_rmspe;
                sum_rmspe += row.rmspe;
                agg.total_design_time_s += row.design_time_s;
                agg.total_fit_time_s += row.fit_time_s;
            }
            if (count == 0) continue;
            agg.mean_log_rmspe = sum_log / count;
            agg.mean_rmspe = sum_rmspe / count;
            double ss = 0.0;
            for (const auto& row : rows) {
                if (row.method != method || row.n != n) continue;
                const double dev = row.log_rmspe - agg.mean_log_rmspe;
                ss += dev * dev;
            }
            agg.sd_log_rmspe = count > 1 ? std::sqrt(ss / (count - 1)) : 0.0;
            aggregates.push_back(std::move(agg));
        }
    }
    return aggregates;
}

std::string benchmark_report_to_json(const BenchmarkReport& report, bool include_timing) {
    nlohmann::json j;
    const auto& config = report.config;
    j["config"] = {
        {"simulator", config.simulator},
        {"methods", config.methods},
        {"run_sizes", config.run_sizes},
        {"replicates", config.replicates},
        {"test_set_size", config.test_set_size},
        {"seed", config.seed.value},
        {"kernel", kernel_family_name(config.kernel)},
        {"nugget", config.gp.fixed_eta ? nlohmann::json(*config.gp.fixed_eta)
                                       : nlohmann::json("estimated (floor 1e-8)")},
        {"output_scaling", "none"},
        {"opt_restarts", config.method_config.opt_restarts},
        {"opt_max_moves", config.method_config.opt_max_moves},
    };
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : report.rows) {
        nlohmann::json r = {
            {"method", row.method}, {"n", row.n},
            {"replicate", row.replicate}, {"rmspe", row.rmspe},
            {"log_rmspe", row.log_rmspe}, {"seed", row.seed},
        };
        if (include_timing) {
            r["design_time_s"] = row.design_time_s;
            r["fit_time_s"] = row.fit_time_s;
        }
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    nlohmann::json aggs = nlohmann::json::array();
    for (const auto& agg : report.aggregates) {
        nlohmann::json a = {
            {"method", agg.method}, {"n", agg.n},
            {"mean_log_rmspe", agg.mean_log_rmspe}, {"sd_log_rmspe", agg.sd_log_rmspe},
            {"mean_rmspe", agg.mean_rmspe},
        };
        if (include_timing) {
            a["total_design_time_s"] = agg.total_design_time_s;
            a["total_fit_time_s"] = agg.total_fit_time_s;
        }
        aggs.push_back(std::move(a));
    }
    j["aggregates"] = std::move(aggs);
    return j.dump(2);
}

void write_benchmark_timing_csv(std::ostream& out, const BenchmarkReport& report) {
    const int d = find_simulator(report.config.simulator).dimension;
    out << "n,d";
    for (const auto& method : report.config.methods) out << "," << method;
    out << "\n";
    for (const int n : report.config.run_sizes) {
        out << n << "," << d;
        for (const auto& method : report.config.methods) {
            double seconds = 0.0;
            for (const auto& agg : report.aggregates)
                if (agg.method == method && agg.n == n) seconds = agg.total_design_time_s;
            out << "," << seconds;
        }
        out << "\n";
    }
}

}  // namespace sfd
