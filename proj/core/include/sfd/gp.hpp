#pragma once

#include <optional>
#include <string>

#include <Eigen/Dense>

#include "sfd/design.hpp"
#include "sfd/rng.hpp"

namespace sfd {

enum class KernelFamily { Gaussian, Matern32 };

/// Anisotropic correlation kernel with inverse-lengthscale parameters theta
/// (one per input dimension, all >= 0).
///
/// Gaussian:  K(a,b) = exp(-sum_j theta_j (a_j - b_j)^2)
/// Matern32:  K(a,b) = (1 + sqrt(3) r) exp(-sqrt(3) r),
///            r^2 = sum_j theta_j (a_j - b_j)^2
struct KernelSpec {
    KernelFamily family = KernelFamily::Matern32;
    Eigen::VectorXd theta;
};

double kernel_eval(const KernelSpec& spec,
                   const Eigen::Ref<const Eigen::RowVectorXd, 0, Eigen::InnerStride<>>& a,
                   const Eigen::Ref<const Eigen::RowVectorXd, 0, Eigen::InnerStride<>>& b);

/// n x n correlation matrix over the rows of a design.
Eigen::MatrixXd kernel_matrix(const KernelSpec& spec, const Design& design);

/// Cholesky factor of K + (eta + jitter) I. Factorization failures escalate
/// the diagonal jitter from 1e-10 to 1e-6 before giving up with FitFailure;
/// the jitter actually used is recorded.
struct FactorizedCovariance {
    Eigen::MatrixXd lower;
    double jitter = 0.0;

    Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
    double log_det() const;  // from the factor diagonal
    int n() const noexcept { return static_cast<int>(lower.rows()); }
};

FactorizedCovariance factorize_covariance(const KernelSpec& spec, double eta,
                                          const Design& design);

/// Closed-form profile estimates:
///   mu_hat   = y' A^-1 1 / (1' A^-1 1)
///   tau2_hat = (y - mu_hat 1)' A^-1 (y - mu_hat 1) / n
/// with A = K + eta I. tau2_hat is floored at a tiny positive value.
std::pair<double, double> closed_form_estimates(const FactorizedCovariance& factor,
                                                const Eigen::VectorXd& y);

/// Profile negative log likelihood  n log(tau2_hat) + log det(K + eta I).
double profile_negative_log_likelihood(const KernelSpec& kernel, double eta, const Design& design,
                                       const Eigen::VectorXd& y);

struct FitConfig {
    // Box bounds on the log parameters, applied to every dimension.
    double log_theta_lower = -6.907755278982137;  // log 1e-3
    double log_theta_upper = 6.907755278982137;   // log 1e3
    double log_eta_lower = -18.420680743952367;   // log 1e-8
    double log_eta_upper = 0.0;                   // log 1
    /// Set to pin the nugget instead of estimating it (0 = interpolation).
    std::optional<double> fixed_eta;
    int multistart_count = 5;
    int max_objective_evals = 2000;
    RngSeed seed{0};
};

/// Fitted ordinary-kriging state. Immutable after fit; cheap to predict with.
struct GPModel {
    KernelSpec kernel;
    double eta = 0.0;
    double mu_hat = 0.0;
    double tau2_hat = 0.0;
    Design train_x;
    Eigen::VectorXd train_y;
    FactorizedCovariance factor;
    Eigen::VectorXd alpha;  // (K + eta I)^-1 (y - mu_hat 1)
    double objective = 0.0;
};

/// Maximum-likelihood fit: multistart Nelder-Mead over the log parameters of
/// the profile objective. Deterministic given config.seed. Throws
/// DegenerateDesignError for duplicate rows with a pinned zero nugget and
/// FitFailure when no start reaches a finite objective.
GPModel fit(const Design& design, const Eigen::VectorXd& y, KernelFamily family,
            const FitConfig& config = {});

/// Ordinary-kriging conditional mean  mu_hat + k(x)' alpha.
double predict_mean(const GPModel& model,
                    const Eigen::Ref<const Eigen::RowVectorXd, 0, Eigen::InnerStride<>>& x);

/// Predictions for every row of `queries`.
Eigen::VectorXd predict_mean(const GPModel& model, const Design& queries);

std::string kernel_family_name(KernelFamily family);
KernelFamily kernel_family_from_name(const std::string& name);

/// Summary JSON {family, theta, eta, mu_hat, tau2_hat, n, d, ...};
/// `include_training` embeds the training data so a model file is
/// self-contained.
std::string gp_model_to_json(const GPModel& model, bool include_training = false);

/// Rebuild a model from its JSON (requires embedded training data).
GPModel gp_model_from_json(const std::string& text);

}  // namespace sfd
