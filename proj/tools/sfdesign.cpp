// sfdesign: command-line front end for design generation, optimization,
// criterion evaluation, orthogonal-array ingestion, GP fitting, bound
// queries, and the benchmark runner.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sfd/criteria.hpp"
#include "sfd/csv.hpp"
#include "sfd/design.hpp"
#include "sfd/errors.hpp"
#include "sfd/gp.hpp"
#include "sfd/oa.hpp"
#include "sfd/optimize.hpp"
#include "sfd/testbed.hpp"
#include "sfd/version.hpp"

namespace {

using nlohmann::json;

std::string g_command_line;

sfd::CsvMeta make_meta(std::uint64_t seed) {
    sfd::CsvMeta meta;
    meta.add("sfdesign", sfd::kVersion);
    meta.add("command", g_command_line);
    meta.add("seed", std::to_string(seed));
    return meta;
}

json meta_json(std::uint64_t seed) {
    return json{{"version", sfd::kVersion}, {"command", g_command_line}, {"seed", seed}};
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open file for writing: " + path);
    out << text << "\n";
}

// Shared criterion flags.
struct CriterionFlags {
    std::string name = "phi_p";
    int q = 2;
    int p = 0;  // 0: pick the run-size default
    double lambda = 1.0;
    std::vector<int> orders{2};
    int s_levels = 0;
    int budget = 10000;
    std::uint64_t mc_seed = 1;

    void attach(CLI::App* cmd) {
        cmd->add_option("--criterion", name,
                        "one of min_distance, phi_p, fill_distance, ard, maxpro, up, centered_l2, "
                        "avg_abs_correlation, max_abs_correlation, star_discrepancy")
            ->capture_default_str();
        cmd->add_option("--q", q, "L_q distance order")->capture_default_str();
        cmd->add_option("--p", p, "phi_p exponent (0 = run-size default)");
        cmd->add_option("--lambda", lambda, "ARD exponent")->capture_default_str();
        cmd->add_option("--orders", orders, "ARD projection orders J")->delimiter(',');
        cmd->add_option("--s-levels", s_levels, "level count for centered_l2/up (0 = run count)");
        cmd->add_option("--budget", budget, "Monte Carlo budget for fill/star estimates")
            ->capture_default_str();
        cmd->add_option("--mc-seed", mc_seed, "Monte Carlo stream seed")->capture_default_str();
    }

    sfd::CriterionSpec build(int n) const {
        sfd::CriterionSpec spec;
        const sfd::CriterionKind kind = sfd::criterion_from_name(name);
        switch (kind) {
            case sfd::CriterionKind::MinDistance: spec = sfd::CriterionSpec::min_distance(q); break;
            case sfd::CriterionKind::PhiP:
                spec = sfd::CriterionSpec::phi_p(q, p > 0 ? p : sfd::default_phi_p_exponent(n));
                break;
            case sfd::CriterionKind::FillDistance:
                spec = sfd::CriterionSpec::fill_distance(budget, sfd::RngSeed{mc_seed});
                break;
            case sfd::CriterionKind::Ard: spec = sfd::CriterionSpec::ard(orders, lambda); break;
            case sfd::CriterionKind::MaxPro: spec = sfd::CriterionSpec::maxpro(); break;
            case sfd::CriterionKind::UniformProjection:
                spec = sfd::CriterionSpec::uniform_projection(s_levels);
                break;
            case sfd::CriterionKind::CenteredL2:
                spec = sfd::CriterionSpec::centered_l2(s_levels);
                break;
            case sfd::CriterionKind::AvgAbsCorrelation:
                spec = sfd::CriterionSpec::avg_abs_correlation();
                break;
            case sfd::CriterionKind::MaxAbsCorrelation:
                spec = sfd::CriterionSpec::max_abs_correlation();
                break;
            case sfd::CriterionKind::StarDiscrepancy:
                spec = sfd::CriterionSpec::star_discrepancy(budget, sfd::RngSeed{mc_seed});
                break;
        }
        return spec;
    }
};

struct ScheduleFlags {
    double cooling = 0.95;
    int moves_per_temperature = 0;
    long long max_moves = 20000;
    bool threshold_accepting = false;
    double threshold_decay = 0.9;
    double initial_temperature = 0.0;  // 0 = auto-calibrate

    void attach(CLI::App* cmd) {
        cmd->add_option("--moves", max_moves, "move budget per restart")->capture_default_str();
        cmd->add_option("--cooling", cooling, "geometric cooling factor")->capture_default_str();
        cmd->add_option("--mpt", moves_per_temperature, "moves per temperature (0 = 10n)");
        cmd->add_flag("--ta", threshold_accepting, "use threshold accepting instead of annealing");
        cmd->add_option("--threshold-decay", threshold_decay, "threshold decay (threshold accepting)")
            ->capture_default_str();
        cmd->add_option("--t0", initial_temperature, "initial temperature (0 = calibrate)");
    }

    sfd::AnnealSchedule build() const {
        sfd::AnnealSchedule schedule;
        schedule.cooling_factor = cooling;
        schedule.moves_per_temperature = moves_per_temperature;
        schedule.max_total_moves = max_moves;
        schedule.threshold_decay = threshold_decay;
        if (threshold_accepting) schedule.mode = sfd::SearchMode::ThresholdAccepting;
        if (initial_temperature > 0.0) schedule.initial_temperature = initial_temperature;
        return schedule;
    }
};

int run(int argc, char** argv) {
    CLI::App app{"space-filling design toolkit"};
    app.set_version_flag("--version", std::string(sfd::kVersion));
    app.require_subcommand(1);

    int threads = 0;
    app.add_option("--threads", threads, "worker threads (0 = machine parallelism)");

    // generate ---------------------------------------------------------------
    auto* generate = app.add_subcommand("generate", "sample a random Latin hypercube (or Halton set)");
    int gen_n = 10, gen_d = 2;
    std::uint64_t gen_seed = 0, gen_skip = 0;
    bool gen_midpoint = false;
    std::string gen_method = "random-lhd", gen_out, gen_levels_out;
    generate->add_option("--n", gen_n, "run count")->required();
    generate->add_option("--d", gen_d, "dimension")->required();
    generate->add_option("--seed", gen_seed, "random seed")->capture_default_str();
    generate->add_flag("--midpoint", gen_midpoint, "use bin midpoints instead of jitter");
    generate->add_option("--method", gen_method, "random-lhd or halton")->capture_default_str();
    generate->add_option("--skip", gen_skip, "Halton points to skip");
    generate->add_option("--out", gen_out, "design CSV path")->required();
    generate->add_option("--levels-out", gen_levels_out, "also write the level matrix CSV");

    // optimize ---------------------------------------------------------------
    auto* optimize = app.add_subcommand("optimize", "improve a Latin hypercube under a criterion");
    CriterionFlags opt_criterion;
    ScheduleFlags opt_schedule;
    int opt_n = 10, opt_d = 2, opt_restarts = 4;
    std::uint64_t opt_seed = 0;
    std::string opt_in, opt_out, opt_result, opt_trace;
    optimize->add_option("--n", opt_n, "run count (fresh random starts)");
    optimize->add_option("--d", opt_d, "dimension (fresh random starts)");
    optimize->add_option("--in", opt_in, "initial Latin hypercube design CSV (single restart)");
    optimize->add_option("--restarts", opt_restarts, "independent restarts")->capture_default_str();
    optimize->add_option("--seed", opt_seed, "random seed")->capture_default_str();
    optimize->add_option("--out", opt_out, "optimized design CSV path")->required();
    optimize->add_option("--result", opt_result, "search summary JSON path");
    optimize->add_option("--trace", opt_trace, "accepted-move trace CSV path");
    opt_criterion.attach(optimize);
    opt_schedule.attach(optimize);

    // evaluate ---------------------------------------------------------------
    auto* evaluate_cmd = app.add_subcommand("evaluate", "evaluate a criterion on a design CSV");
    CriterionFlags eval_criterion;
    std::string eval_in;
    evaluate_cmd->add_option("--in", eval_in, "design CSV path")->required();
    eval_criterion.attach(evaluate_cmd);

    // oa-lhd -----------------------------------------------------------------
    auto* oalhd = app.add_subcommand("oa-lhd", "build an orthogonal-array-based Latin hypercube");
    std::string oalhd_file, oalhd_out, oalhd_levels_out;
    std::uint64_t oalhd_seed = 0;
    oalhd->add_option("--oa", oalhd_file, "orthogonal array file")->required();
    oalhd->add_option("--seed", oalhd_seed, "random seed")->capture_default_str();
    oalhd->add_option("--out", oalhd_out, "design CSV path")->required();
    oalhd->add_option("--levels-out", oalhd_levels_out, "also write the level matrix CSV");

    // verify-oa --------------------------------------------------------------
    auto* verify = app.add_subcommand("verify-oa", "check an orthogonal array's strength");
    std::string verify_file, verify_out;
    int verify_t = 0;
    verify->add_option("--oa", verify_file, "orthogonal array file")->required();
    verify->add_option("--strength", verify_t, "strength to check (0 = declared)");
    verify->add_option("--out", verify_out, "write the JSON report here as well");

    // gp-fit -----------------------------------------------------------------
    auto* gpfit = app.add_subcommand("gp-fit", "fit an ordinary-kriging emulator");
    std::string gp_design, gp_response, gp_sim, gp_kernel = "matern32", gp_out;
    double gp_eta = -1.0;  // < 0: estimate
    int gp_starts = 5, gp_max_evals = 2000;
    std::uint64_t gp_seed = 0;
    gpfit->add_option("--design", gp_design, "training design CSV")->required();
    gpfit->add_option("--response", gp_response, "training response CSV");
    gpfit->add_option("--simulator", gp_sim, "evaluate this simulator for the responses");
    gpfit->add_option("--kernel", gp_kernel, "gaussian or matern32")->capture_default_str();
    gpfit->add_option("--eta", gp_eta, "fix the nugget (default: estimate with floor 1e-8)");
    gpfit->add_option("--starts", gp_starts, "multistart count")->capture_default_str();
    gpfit->add_option("--max-evals", gp_max_evals, "objective evaluation budget")
        ->capture_default_str();
    gpfit->add_option("--seed", gp_seed, "random seed")->capture_default_str();
    gpfit->add_option("--out", gp_out, "model JSON path")->required();

    // predict ----------------------------------------------------------------
    auto* predict = app.add_subcommand("predict", "predict with a fitted model");
    std::string pred_model, pred_points, pred_out;
    predict->add_option("--model", pred_model, "model JSON from gp-fit")->required();
    predict->add_option("--points", pred_points, "query design CSV")->required();
    predict->add_option("--out", pred_out, "prediction CSV path (default: stdout)");

    // benchmark ----------------------------------------------------------------
    auto* bench = app.add_subcommand("benchmark", "replicate design-method comparison");
    sfd::BenchmarkConfig bench_config;
    std::uint64_t bench_seed = 0;
    std::string bench_out, bench_timing, bench_kernel = "matern32";
    double bench_eta = -1.0;
    bench->add_option("--simulator", bench_config.simulator, "simulator name")
        ->capture_default_str();
    bench->add_option("--methods", bench_config.methods, "design methods to compare")
        ->delimiter(',')
        ->capture_default_str();
    bench->add_option("--sizes", bench_config.run_sizes, "run sizes")
        ->delimiter(',')
        ->capture_default_str();
    bench->add_option("--replicates", bench_config.replicates, "replicates per cell")
        ->capture_default_str();
    bench->add_option("--test-n", bench_config.test_set_size, "test set size N")
        ->capture_default_str();
    bench->add_option("--seed", bench_seed, "random seed")->capture_default_str();
    bench->add_option("--kernel", bench_kernel, "gaussian or matern32")->capture_default_str();
    bench->add_option("--eta", bench_eta, "fix the nugget (default: estimate with floor 1e-8)");
    bench->add_option("--restarts", bench_config.method_config.opt_restarts,
                      "optimizer restarts per design")
        ->capture_default_str();
    bench->add_option("--moves", bench_config.method_config.opt_max_moves,
                      "optimizer move budget per restart")
        ->capture_default_str();
    bench->add_option("--oa", bench_config.method_config.oa_file, "array file for oa-lhd");
    bench->add_option("--out", bench_out, "report JSON path")->required();
    bench->add_option("--timing-csv", bench_timing, "aggregate timing table CSV path");

    // bounds -----------------------------------------------------------------
    auto* bounds = app.add_subcommand("bounds", "orthogonal Latin hypercube factor bound");
    int bounds_n = 0;
    std::string bounds_out;
    bounds->add_option("--n", bounds_n, "run size")->required();
    bounds->add_option("--out", bounds_out, "write the JSON report here as well");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;  // usage error
    }

    if (*generate) {
        sfd::Design design;
        sfd::LatinHypercube lh;
        const bool is_halton = gen_method == "halton";
        if (is_halton) {
            design = sfd::halton_sequence(gen_n, gen_d, gen_skip);
        } else if (gen_method == "random-lhd") {
            lh = sfd::random_latin_hypercube(gen_n, gen_d, sfd::RngSeed{gen_seed}, gen_midpoint);
            design = sfd::realize(lh);
        } else {
            throw sfd::NotFoundError("unknown generation method: " + gen_method);
        }
        sfd::write_design_csv(gen_out, design, make_meta(gen_seed));
        if (!gen_levels_out.empty()) {
            if (is_halton) throw sfd::ConfigError("--levels-out applies to Latin hypercubes only");
            std::ofstream out(gen_levels_out);
            sfd::write_levels_csv(out, lh.levels, make_meta(gen_seed));
        }
        return 0;
    }

    if (*optimize) {
        const sfd::AnnealSchedule schedule = opt_schedule.build();
        sfd::SearchResult result;
        sfd::CriterionSpec spec;
        if (!opt_in.empty()) {
            if (optimize->count("--restarts") != 0 && opt_restarts != 1) {
                std::cerr << "error: --in starts from a fixed design; use --restarts 1\n";
                return 2;
            }
            const sfd::Design initial = sfd::read_design_csv(opt_in);
            spec = opt_criterion.build(initial.n());
            result = sfd::anneal(sfd::latin_hypercube_from_design(initial), spec, schedule,
                                 sfd::RngSeed{opt_seed});
        } else {
            spec = opt_criterion.build(opt_n);
            result = sfd::multi_restart(opt_n, opt_d, spec, opt_restarts, schedule,
                                        sfd::RngSeed{opt_seed}, threads);
        }
        sfd::write_design_csv(opt_out, sfd::realize(result.best_design), make_meta(opt_seed));
        if (!opt_result.empty()) {
            json j = json::parse(sfd::search_result_to_json(result, spec));
            j["meta"] = meta_json(opt_seed);
            write_text_file(opt_result, j.dump(2));
        }
        if (!opt_trace.empty()) {
            std::ofstream out(opt_trace);
            if (!out) throw std::runtime_error("cannot open file for writing: " + opt_trace);
            sfd::write_trace_csv(out, result);
        }
        std::cout << sfd::format_double(result.best_value) << "\n";
        return 0;
    }

    if (*evaluate_cmd) {
        const sfd::Design design = sfd::read_design_csv(eval_in);
        const sfd::CriterionSpec spec = eval_criterion.build(design.n());
        std::cout << sfd::format_double(sfd::evaluate(design, spec)) << "\n";
        return 0;
    }

    if (*oalhd) {
        const sfd::OrthogonalArray oa = sfd::parse_oa_file(oalhd_file);
        const sfd::LatinHypercube lh = sfd::oa_based_lhd(oa, sfd::RngSeed{oalhd_seed});
        sfd::write_design_csv(oalhd_out, sfd::realize(lh), make_meta(oalhd_seed));
        if (!oalhd_levels_out.empty()) {
            std::ofstream out(oalhd_levels_out);
            sfd::write_levels_csv(out, lh.levels, make_meta(oalhd_seed));
        }
        return 0;
    }

    if (*verify) {
        const sfd::OrthogonalArray oa = sfd::parse_oa_file(verify_file);
        const int t = verify_t > 0 ? verify_t : oa.t;
        json j{{"n", oa.n()},
               {"d", oa.d()},
               {"s", oa.s},
               {"t", t},
               {"valid", sfd::verify_strength(oa, t)}};
        if (j["valid"].get<bool>()) j["lambda"] = oa.n() / static_cast<int>(std::pow(oa.s, t));
        std::cout << j.dump() << "\n";
        if (!verify_out.empty()) {
            j["meta"] = meta_json(0);
            write_text_file(verify_out, j.dump(2));
        }
        return 0;
    }

    if (*gpfit) {
        const sfd::Design design = sfd::read_design_csv(gp_design);
        Eigen::VectorXd y;
        if (!gp_response.empty()) {
            y = sfd::read_response_csv(gp_response);
        } else if (!gp_sim.empty()) {
            y = sfd::eval_simulator(gp_sim, design);
        } else {
            std::cerr << "error: gp-fit needs --response or --simulator\n";
            return 2;
        }
        sfd::FitConfig config;
        config.multistart_count = gp_starts;
        config.max_objective_evals = gp_max_evals;
        config.seed = sfd::RngSeed{gp_seed};
        if (gp_eta >= 0.0) config.fixed_eta = gp_eta;
        const sfd::GPModel model =
            sfd::fit(design, y, sfd::kernel_family_from_name(gp_kernel), config);
        json j = json::parse(sfd::gp_model_to_json(model, /*include_training=*/true));
        j["meta"] = meta_json(gp_seed);
        write_text_file(gp_out, j.dump(2));
        std::cout << sfd::gp_model_to_json(model) << "\n";
        return 0;
    }

    if (*predict) {
        std::ifstream in(pred_model);
        if (!in) throw std::runtime_error("cannot open model file: " + pred_model);
        std::stringstream buffer;
        buffer << in.rdbuf();
        const sfd::GPModel model = sfd::gp_model_from_json(buffer.str());
        const sfd::Design queries = sfd::read_design_csv(pred_points);
        const Eigen::VectorXd predictions = sfd::predict_mean(model, queries);
        if (pred_out.empty()) {
            for (Eigen::Index i = 0; i < predictions.size(); ++i)
                std::cout << sfd::format_double(predictions[i]) << "\n";
        } else {
            std::ofstream out(pred_out);
            if (!out) throw std::runtime_error("cannot open file for writing: " + pred_out);
            sfd::write_response_csv(out, predictions, make_meta(0));
        }
        return 0;
    }

    if (*bench) {
        bench_config.seed = sfd::RngSeed{bench_seed};
        bench_config.kernel = sfd::kernel_family_from_name(bench_kernel);
        bench_config.threads = threads;
        if (bench_eta >= 0.0) bench_config.gp.fixed_eta = bench_eta;
        const sfd::BenchmarkReport report = sfd::run_benchmark(bench_config);
        json j = json::parse(sfd::benchmark_report_to_json(report));
        j["meta"] = meta_json(bench_seed);
        write_text_file(bench_out, j.dump(2));
        if (!bench_timing.empty()) {
            std::ofstream out(bench_timing);
            if (!out) throw std::runtime_error("cannot open file for writing: " + bench_timing);
            sfd::write_benchmark_timing_csv(out, report);
        }
        for (const auto& agg : report.aggregates)
            std::cout << agg.method << " n=" << agg.n << " mean_log_rmspe=" << agg.mean_log_rmspe
                      << " sd=" << agg.sd_log_rmspe << "\n";
        return 0;
    }

    if (*bounds) {
        const sfd::OlhBound bound = sfd::olh_factor_bound(bounds_n);
        std::cout << sfd::olh_bound_to_json(bound) << "\n";
        if (!bounds_out.empty()) {
            json j = json::parse(sfd::olh_bound_to_json(bound));
            j["meta"] = meta_json(0);
            write_text_file(bounds_out, j.dump(2));
        }
        return 0;
    }

    return 2;
}

std::string error_kind(const std::exception& e) {
    if (dynamic_cast<const sfd::DegenerateDesignError*>(&e)) return "degenerate-design";
    if (dynamic_cast<const sfd::FitFailure*>(&e)) return "fit-failure";
    if (dynamic_cast<const sfd::ParseError*>(&e)) return "parse-error";
    if (dynamic_cast<const sfd::NotFoundError*>(&e)) return "not-found";
    if (dynamic_cast<const sfd::ConfigError*>(&e)) return "config-error";
    if (dynamic_cast<const std::invalid_argument*>(&e)) return "invalid-argument";
    if (dynamic_cast<const std::logic_error*>(&e)) return "internal";
    return "runtime-error";
}

}  // namespace

int main(int argc, char** argv) {
    std::ostringstream cmd;
    for (int i = 0; i < argc; ++i) cmd << (i ? " " : "") << argv[i];
    g_command_line = cmd.str();
    try {
        return run(argc, argv);
    } catch (const std::exception& e) {
        const json err{{"error", {{"kind", error_kind(e)}, {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        return 1;
    }
}
