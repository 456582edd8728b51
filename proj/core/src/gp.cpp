#include "sfd/gp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "sfd/errors.hpp"

namespace sfd {

namespace {

constexpr double kSqrt3 = 1.7320508075688772;
constexpr double kTau2Floor = 1e-300;
constexpr double kBadObjective = 1e100;

void check_theta(const KernelSpec& spec, int d) {
    if (spec.theta.size() != d) throw std::invalid_argument("kernel: theta dimension mismatch");
    if ((spec.theta.array() < 0.0).any())
        throw std::invalid_argument("kernel: theta must be non-negative");
}

}  // namespace

double kernel_eval(const KernelSpec& spec,
                   const Eigen::Ref<const Eigen::RowVectorXd, 0, Eigen::InnerStride<>>& a,
                   const Eigen::Ref<const Eigen::RowVectorXd, 0, Eigen::InnerStride<>>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("kernel_eval: dimension mismatch");
    check_theta(spec, static_cast<int>(a.size()));
    double r2 = 0.0;
    for (Eigen::Index j = 0; j < a.size(); ++j) {
        const double delta = a[j] - b[j];
        r2 += spec.theta[j] * delta * delta;
    }
    if (spec.family == KernelFamily::Gaussian) return std::exp(-r2);
    const double r = std::sqrt(r2);
    return (1.0 + kSqrt3 * r) * std::exp(-kSqrt3 * r);
}

Eigen::MatrixXd kernel_matrix(const KernelSpec& spec, const Design& design) {
    check_theta(spec, design.d());
    const int n = design.n();
    Eigen::MatrixXd k(n, n);
    for (int i = 0; i < n; ++i) {
        k(i, i) = 1.0;
        for (int j = i + 1; j < n; ++j) {
            k(i, j) = k(j, i) = kernel_eval(spec, design.points.row(i), design.points.row(j));
        }
    }
    return k;
}

Eigen::VectorXd FactorizedCovariance::solve(const Eigen::VectorXd& rhs) const {
    Eigen::VectorXd x = lower.triangularView<Eigen::Lower>().solve(rhs);
    lower.transpose().triangularView<Eigen::Upper>().solveInPlace(x);
    return x;
}

double FactorizedCovariance::log_det() const {
    return 2.0 * lower.diagonal().array().log().sum();
}

FactorizedCovariance factorize_covariance(const KernelSpec& spec, double eta,
                                          const Design& design) {
    if (eta < 0.0) throw std::invalid_argument("factorize_covariance: eta must be >= 0");
    const Eigen::MatrixXd k = kernel_matrix(spec, design);
    const int n = design.n();
    // Jitter escalation: 0, then 1e-10 up to 1e-6.
    double jitter = 0.0;
    for (int attempt = 0; attempt <= 5; ++attempt) {
        Eigen::MatrixXd a = k;
        a.diagonal().array() += eta + jitter;
        const Eigen::LLT<Eigen::MatrixXd> llt(a);
        if (llt.info() == Eigen::Success) {
            FactorizedCovariance factor;
            factor.lower = llt.matrixL();
            factor.jitter = jitter;
            return factor;
        }
        jitter = attempt == 0 ? 1e-10 : jitter * 10.0;
    }
    (void)n;
    throw FitFailure("covariance factorization failed even with jitter up to 1e-6");
}

std::pair<double, double> closed_form_estimates(const FactorizedCovariance& factor,
                                                const Eigen::VectorXd& y) {
    const int n = factor.n();
    if (y.size() != n) throw std::invalid_argument("closed_form_estimates: y size mismatch");
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
    const Eigen::VectorXd a_inv_ones = factor.solve(ones);
    const double denom = ones.dot(a_inv_ones);
    if (!(denom > 0.0)) throw FitFailure("closed_form_estimates: singular system");
    const double mu_hat = y.dot(a_inv_ones) / denom;
    const Eigen::VectorXd centered = y.array() - mu_hat;
    const double tau2 = centered.dot(factor.solve(centered)) / n;
    return {mu_hat, std::max(tau2, kTau2Floor)};
}

double profile_negative_log_likelihood(const KernelSpec& kernel, double eta, const Design& design,
                                       const Eigen::VectorXd& y) {
    const FactorizedCovariance factor = factorize_covariance(kernel, eta, design);
    const auto [mu_hat, tau2_hat] = closed_form_estimates(factor, y);
    (void)mu_hat;
    return design.n() * std::log(tau2_hat) + factor.log_det();
}

namespace {

// Nelder-Mead with box clamping; returns the best point visited.
struct SimplexResult {
    Eigen::VectorXd x;
    double value = kBadObjective;
    int evals = 0;
};

template <typename Objective>
SimplexResult nelder_mead(Objective&& objective, const Eigen::VectorXd& start,
                          const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                          int max_evals) {
    const int dim = static_cast<int>(start.size());
    const auto clamp = [&](Eigen::VectorXd x) {
        for (int i = 0; i < dim; ++i) x[i] = std::clamp(x[i], lower[i], upper[i]);
        return x;
    };

    SimplexResult result;
    result.x = clamp(start);

    std::vector<Eigen::VectorXd> simplex;
    std::vector<double> values;
    simplex.push_back(result.x);
    for (int i = 0; i < dim; ++i) {
        Eigen::VectorXd v = result.x;
        const double step = 0.5 * std::min(upper[i] - v[i], v[i] - lower[i]) + 0.25;
        v[i] = std::clamp(v[i] + step, lower[i], upper[i]);
        if (v[i] == result.x[i]) v[i] = std::clamp(v[i] - step, lower[i], upper[i]);
        simplex.push_back(v);
    }
    for (const auto& v : simplex) {
        values.push_back(objective(v));
        ++result.evals;
    }

    const auto record_best = [&]() {
        for (std::size_t i = 0; i < simplex.size(); ++i) {
            if (values[i] < result.value) {
                result.value = values[i];
                result.x = simplex[i];
            }
        }
    };
    record_best();

    std::vector<std::size_t> order(simplex.size());
    while (result.evals < max_evals) {
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second_worst = order[order.size() - 2];

        if (values[worst] - values[best] < 1e-12 * (1.0 + std::abs(values[best]))) break;

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(dim);
        for (const std::size_t i : order)
            if (i != worst) centroid += simplex[i];
        centroid /= static_cast<double>(dim);

        const auto try_point = [&](double coeff) {
            Eigen::VectorXd candidate = clamp(centroid + coeff * (centroid - simplex[worst]));
            const double value = objective(candidate);
            ++result.evals;
            return std::make_pair(std::move(candidate), value);
        };

        auto [reflected, f_reflected] = try_point(1.0);
        if (f_reflected < values[best]) {
            auto [expanded, f_expanded] = try_point(2.0);
            if (f_expanded < f_reflected) {
                simplex[worst] = expanded;
                values[worst] = f_expanded;
            } else {
                simplex[worst] = reflected;
                values[worst] = f_reflected;
            }
        } else if (f_reflected < values[second_worst]) {
            simplex[worst] = reflected;
            values[worst] = f_reflected;
        } else {
            auto [contracted, f_contracted] = try_point(-0.5);
            if (f_contracted < values[worst]) {
                simplex[worst] = contracted;
                values[worst] = f_contracted;
            } else {
                // Shrink toward the best vertex.
                for (const std::size_t i : order) {
                    if (i == best) continue;
                    simplex[i] = clamp(simplex[best] + 0.5 * (simplex[i] - simplex[best]));
                    values[i] = objective(simplex[i]);
                    ++result.evals;
                    if (result.evals >= max_evals) break;
                }
            }
        }
        record_best();
    }
    record_best();
    return result;
}

}  // namespace

GPModel fit(const Design& design, const Eigen::VectorXd& y, KernelFamily family,
            const FitConfig& config) {
    const int n = design.n();
    const int d = design.d();
    if (n < 2) throw std::invalid_argument("fit: need at least 2 runs");
    if (y.size() != n) throw std::invalid_argument("fit: y size mismatch");
    if (config.multistart_count < 1) throw std::invalid_argument("fit: multistart_count >= 1");

    const bool eta_pinned_zero = config.fixed_eta && *config.fixed_eta == 0.0;
    if (eta_pinned_zero) {
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (design.points.row(i) == design.points.row(j))
                    throw DegenerateDesignError("fit: duplicate rows with a zero nugget");
    }

    const int n_params = config.fixed_eta ? d : d + 1;
    Eigen::VectorXd lower(n_params);
    Eigen::VectorXd upper(n_params);
    for (int i = 0; i < d; ++i) {
        lower[i] = config.log_theta_lower;
        upper[i] = config.log_theta_upper;
    }
    if (!config.fixed_eta) {
        lower[d] = config.log_eta_lower;
        upper[d] = config.log_eta_upper;
    }

    const auto unpack = [&](const Eigen::VectorXd& z) {
        KernelSpec kernel;
        kernel.family = family;
        kernel.theta = z.head(d).array().exp();
        const double eta = config.fixed_eta ? *config.fixed_eta : std::exp(z[d]);
        return std::make_pair(kernel, eta);
    };

    const auto objective = [&](const Eigen::VectorXd& z) {
        try {
            const auto [kernel, eta] = unpack(z);
            const double value = profile_negative_log_likelihood(kernel, eta, design, y);
            return std::isfinite(value) ? value : kBadObjective;
        } catch (const FitFailure&) {
            return kBadObjective;
        }
    };

    Rng rng(config.seed);
    const int per_start = std::max(60, config.max_objective_evals / config.multistart_count);
    SimplexResult best;
    for (int start = 0; start < config.multistart_count; ++start) {
        Eigen::VectorXd z0(n_params);
        if (start == 0) {
            z0.head(d).setZero();  // theta = 1
            if (!config.fixed_eta) z0[d] = std::log(1e-6);
        } else {
            Rng stream = rng.split(static_cast<std::uint64_t>(start));
            for (int i = 0; i < n_params; ++i)
                z0[i] = lower[i] + stream.uniform01() * (upper[i] - lower[i]);
        }
        for (int i = 0; i < n_params; ++i) z0[i] = std::clamp(z0[i], lower[i], upper[i]);
        SimplexResult run = nelder_mead(objective, z0, lower, upper, per_start);
        if (run.value < best.value) best = run;
    }
    if (best.value >= kBadObjective)
        throw FitFailure("fit: no finite profile objective found in the search box");

    auto [kernel, eta] = unpack(best.x);
    GPModel model;
    model.kernel = std::move(kernel);
    model.eta = eta;
    model.train_x = design;
    model.train_y = y;
    model.factor = factorize_covariance(model.kernel, eta, design);
    const auto [mu_hat, tau2_hat] = closed_form_estimates(model.factor, y);
    model.mu_hat = mu_hat;
    model.tau2_hat = tau2_hat;
    model.alpha = model.factor.solve(Eigen::VectorXd(y.array() - mu_hat));
    model.objective = best.value;
    return model;
}

double predict_mean(const GPModel& model,
                    const Eigen::Ref<const Eigen::RowVectorXd, 0, Eigen::InnerStride<>>& x) {
    if (x.size() != model.train_x.d())
        throw std::invalid_argument("predict_mean: query dimension mismatch");
    double acc = 0.0;
    for (int i = 0; i < model.train_x.n(); ++i)
        acc += kernel_eval(model.kernel, x, model.train_x.points.row(i)) * model.alpha[i];
    return model.mu_hat + acc;
}

Eigen::VectorXd predict_mean(const GPModel& model, const Design& queries) {
    Eigen::VectorXd out(queries.n());
    for (int i = 0; i < queries.n(); ++i) out[i] = predict_mean(model, queries.points.row(i));
    return out;
}

std::string kernel_family_name(KernelFamily family) {
    return family == KernelFamily::Gaussian ? "gaussian" : "matern32";
}

KernelFamily kernel_family_from_name(const std::string& name) {
    if (name == "gaussian") return KernelFamily::Gaussian;
    if (name == "matern32") return KernelFamily::Matern32;
    throw NotFoundError("unknown kernel family: " + name);
}

std::string gp_model_to_json(const GPModel& model, bool include_training) {
    nlohmann::json j;
    j["family"] = kernel_family_name(model.kernel.family);
    j["theta"] = std::vector<double>(model.kernel.theta.begin(), model.kernel.theta.end());
    j["eta"] = model.eta;
    j["mu_hat"] = model.mu_hat;
    j["tau2_hat"] = model.tau2_hat;
    j["n"] = model.train_x.n();
    j["d"] = model.train_x.d();
    j["jitter"] = model.factor.jitter;
    j["objective"] = model.objective;
    if (include_training) {
        std::vector<std::vector<double>> x(static_cast<std::size_t>(model.train_x.n()));
        for (int i = 0; i < model.train_x.n(); ++i)
            for (int jcol = 0; jcol < model.train_x.d(); ++jcol)
                x[static_cast<std::size_t>(i)].push_back(model.train_x.points(i, jcol));
        j["train_x"] = x;
        j["train_y"] = std::vector<double>(model.train_y.begin(), model.train_y.end());
    }
    return j.dump();
}

GPModel gp_model_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    if (!j.contains("train_x") || !j.contains("train_y"))
        throw std::invalid_argument("gp_model_from_json: model file lacks training data");

    GPModel model;
    model.kernel.family = kernel_family_from_name(j.at("family").get<std::string>());
    const auto theta = j.at("theta").get<std::vector<double>>();
    model.kernel.theta = Eigen::Map<const Eigen::VectorXd>(theta.data(),
                                                           static_cast<Eigen::Index>(theta.size()));
    model.eta = j.at("eta").get<double>();

    const auto x = j.at("train_x").get<std::vector<std::vector<double>>>();
    const auto yv = j.at("train_y").get<std::vector<double>>();
    const int n = static_cast<int>(x.size());
    const int d = n > 0 ? static_cast<int>(x.front().size()) : 0;
    model.train_x.points.resize(n, d);
    for (int i = 0; i < n; ++i)
        for (int jcol = 0; jcol < d; ++jcol)
            model.train_x.points(i, jcol) = x[static_cast<std::size_t>(i)][static_cast<std::size_t>(jcol)];
    model.train_y = Eigen::Map<const Eigen::VectorXd>(yv.data(), static_cast<Eigen::Index>(yv.size()));

    model.factor = factorize_covariance(model.kernel, model.eta, model.train_x);
    const auto [mu_hat, tau2_hat] = closed_form_estimates(model.factor, model.train_y);
    model.mu_hat = mu_hat;
    model.tau2_hat = tau2_hat;
    model.alpha = model.factor.solve(Eigen::VectorXd(model.train_y.array() - mu_hat));
    model.objective = j.value("objective", 0.0);
    return model;
}

}  // namespace sfd
