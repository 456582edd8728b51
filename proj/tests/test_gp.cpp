#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sfd/design.hpp"
#include "sfd/errors.hpp"
#include "sfd/gp.hpp"
#include "sfd/testbed.hpp"

using namespace sfd;

namespace {

KernelSpec kernel1d(KernelFamily family, double theta) {
    KernelSpec spec;
    spec.family = family;
    spec.theta = Eigen::VectorXd::Constant(1, theta);
    return spec;
}

Design design_1d(std::initializer_list<double> values) {
    Design design;
    design.points.resize(static_cast<Eigen::Index>(values.size()), 1);
    Eigen::Index i = 0;
    for (const double v : values) design.points(i++, 0) = v;
    return design;
}

// Dense reference path: build K + eta I explicitly and use a pivoted LU
// solve, fully independent of the Cholesky code.
struct DenseRef {
    Eigen::MatrixXd a;
    explicit DenseRef(const KernelSpec& k, double eta, const Design& x) {
        a = kernel_matrix(k, x);
        a.diagonal().array() += eta;
    }
    Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const {
        return a.fullPivLu().solve(rhs);
    }
};

}  // namespace

TEST_CASE("kernel values at worked points") {
    const auto gauss = kernel1d(KernelFamily::Gaussian, 1.0);
    Eigen::RowVectorXd zero(1), one(1);
    zero << 0.0;
    one << 1.0;
    CHECK(kernel_eval(gauss, zero, zero) == doctest::Approx(1.0));
    CHECK(kernel_eval(gauss, zero, one) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));

    const auto matern = kernel1d(KernelFamily::Matern32, 1.0);
    CHECK(kernel_eval(matern, zero, one) ==
          doctest::Approx((1.0 + std::sqrt(3.0)) * std::exp(-std::sqrt(3.0))).epsilon(1e-12));
    CHECK(kernel_eval(matern, one, one) == doctest::Approx(1.0));

    auto bad = gauss;
    bad.theta[0] = -0.5;
    CHECK_THROWS_AS(kernel_eval(bad, zero, one), std::invalid_argument);
}

TEST_CASE("kernel matrices are symmetric with unit diagonal and entries in (0,1]") {
    const auto x = realize(random_latin_hypercube(12, 3, RngSeed{4}));
    KernelSpec spec;
    spec.family = KernelFamily::Matern32;
    spec.theta = Eigen::VectorXd::Constant(3, 2.5);
    const auto k = kernel_matrix(spec, x);
    CHECK((k - k.transpose()).cwiseAbs().maxCoeff() == 0.0);
    for (int i = 0; i < 12; ++i) CHECK(k(i, i) == 1.0);
    CHECK((k.array() > 0.0).all());
    CHECK((k.array() <= 1.0).all());
}

TEST_CASE("factorization reconstructs K + eta I") {
    const auto x = realize(random_latin_hypercube(10, 2, RngSeed{6}));
    KernelSpec spec;
    spec.family = KernelFamily::Matern32;
    spec.theta = Eigen::VectorXd::Constant(2, 4.0);
    const double eta = 1e-4;
    const auto factor = factorize_covariance(spec, eta, x);
    Eigen::MatrixXd reconstructed = factor.lower * factor.lower.transpose();
    Eigen::MatrixXd expected = kernel_matrix(spec, x);
    expected.diagonal().array() += eta + factor.jitter;
    CHECK((reconstructed - expected).cwiseAbs().maxCoeff() < 1e-8 * expected.norm());
}

TEST_CASE("closed-form estimates with an identity-like covariance") {
    // far-apart points with a huge theta: K is numerically the identity
    const auto x = design_1d({0.05, 0.35, 0.65, 0.95});
    const auto spec = kernel1d(KernelFamily::Gaussian, 1e6);
    Eigen::VectorXd y(4);
    y << 1.0, 3.0, 2.0, 6.0;
    const auto factor = factorize_covariance(spec, 0.0, x);
    const auto [mu, tau2] = closed_form_estimates(factor, y);
    CHECK(mu == doctest::Approx(y.mean()).epsilon(1e-9));
    const double var = (y.array() - y.mean()).square().sum() / 4.0;
    CHECK(tau2 == doctest::Approx(var).epsilon(1e-9));
}

TEST_CASE("constant outputs give mu = c and tiny tau2") {
    const auto x = design_1d({0.1, 0.4, 0.7});
    const auto spec = kernel1d(KernelFamily::Matern32, 2.0);
    const Eigen::VectorXd y = Eigen::VectorXd::Constant(3, 4.2);
    const auto factor = factorize_covariance(spec, 1e-6, x);
    const auto [mu, tau2] = closed_form_estimates(factor, y);
    CHECK(mu == doctest::Approx(4.2).epsilon(1e-10));
    CHECK(tau2 < 1e-12);
}

TEST_CASE("closed-form estimates match a dense LU oracle") {
    const auto x = realize(random_latin_hypercube(8, 1, RngSeed{16}));
    KernelSpec spec = kernel1d(KernelFamily::Matern32, 3.0);
    const double eta = 1e-3;
    Eigen::VectorXd y(8);
    y << 0.3, -1.2, 2.2, 0.7, 0.1, -0.5, 1.9, 0.8;

    const auto factor = factorize_covariance(spec, eta, x);
    const auto [mu, tau2] = closed_form_estimates(factor, y);

    const DenseRef ref(spec, eta, x);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(8);
    const double mu_ref = y.dot(ref.solve(ones)) / ones.dot(ref.solve(ones));
    const Eigen::VectorXd centered = y.array() - mu_ref;
    const double tau2_ref = centered.dot(ref.solve(centered)) / 8.0;
    CHECK(mu == doctest::Approx(mu_ref).epsilon(1e-10));
    CHECK(tau2 == doctest::Approx(tau2_ref).epsilon(1e-10));
}

TEST_CASE("profile objective matches a symbolic 2-point evaluation") {
    // For two points with correlation r and eta = 0:
    //   mu = (y1+y2)/2, tau2 = ((y1-mu)^2 + (y2-mu)^2 - 2r(y1-mu)(y2-mu)) / (2(1-r^2))
    //   objective = 2 log(tau2) + log(1 - r^2)
    const auto x = design_1d({0.2, 0.8});
    const auto spec = kernel1d(KernelFamily::Gaussian, 2.0);
    Eigen::VectorXd y(2);
    y << 1.0, 2.5;
    const double r = std::exp(-2.0 * 0.36);
    const double mu = 1.75;
    const double q = ((y[0] - mu) * (y[0] - mu) + (y[1] - mu) * (y[1] - mu) -
                      2.0 * r * (y[0] - mu) * (y[1] - mu)) /
                     (1.0 - r * r);
    const double tau2 = q / 2.0;
    const double expected = 2.0 * std::log(tau2) + std::log(1.0 - r * r);
    CHECK(profile_negative_log_likelihood(spec, 0.0, x, y) ==
          doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("scaling y by c adds 2n log c to the profile objective") {
    const auto x = realize(random_latin_hypercube(9, 2, RngSeed{17}));
    KernelSpec spec;
    spec.family = KernelFamily::Matern32;
    spec.theta = Eigen::VectorXd::Constant(2, 1.5);
    Eigen::VectorXd y(9);
    for (int i = 0; i < 9; ++i) y[i] = std::sin(2.1 * i) + 0.3 * i;
    const double base = profile_negative_log_likelihood(spec, 1e-6, x, y);
    const double c = 3.7;
    const double scaled = profile_negative_log_likelihood(spec, 1e-6, x, Eigen::VectorXd(c * y));
    CHECK(scaled - base == doctest::Approx(2.0 * 9.0 * std::log(c)).epsilon(1e-9));
}

TEST_CASE("profile objective equals the dense-determinant oracle") {
    const auto x = realize(random_latin_hypercube(14, 2, RngSeed{18}));
    KernelSpec spec;
    spec.family = KernelFamily::Gaussian;
    spec.theta = Eigen::VectorXd::Constant(2, 5.0);
    Eigen::VectorXd y(14);
    for (int i = 0; i < 14; ++i) y[i] = std::cos(1.7 * i);
    const double eta = 1e-5;

    const DenseRef ref(spec, eta, x);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(14);
    const double mu_ref = y.dot(ref.solve(ones)) / ones.dot(ref.solve(ones));
    const Eigen::VectorXd centered = y.array() - mu_ref;
    const double tau2_ref = centered.dot(ref.solve(centered)) / 14.0;
    const double expected = 14.0 * std::log(tau2_ref) + std::log(ref.a.determinant());
    CHECK(profile_negative_log_likelihood(spec, eta, x, y) ==
          doctest::Approx(expected).epsilon(1e-8));
}

TEST_CASE("profile objective is finite across the search box on a Friedman sample") {
    const auto x = realize(random_latin_hypercube(20, 5, RngSeed{19}));
    const Eigen::VectorXd y = eval_simulator("friedman", x);
    for (const double log_theta : {-6.9, -3.0, 0.0, 3.0, 6.9}) {
        for (const double log_eta : {-18.4, -9.0, -4.0, -1.0, 0.0}) {
            KernelSpec spec;
            spec.family = KernelFamily::Matern32;
            spec.theta = Eigen::VectorXd::Constant(5, std::exp(log_theta));
            const double value =
                profile_negative_log_likelihood(spec, std::exp(log_eta), x, y);
            CHECK(std::isfinite(value));
        }
    }
}

TEST_CASE("fit is deterministic and interpolates with a pinned zero nugget") {
    const auto x = realize(random_latin_hypercube(25, 2, RngSeed{20}));
    Eigen::VectorXd y(25);
    for (int i = 0; i < 25; ++i)
        y[i] = std::sin(6.0 * x.points(i, 0)) + 0.5 * x.points(i, 1);

    FitConfig config;
    config.fixed_eta = 0.0;
    config.seed = RngSeed{11};
    const auto a = fit(x, y, KernelFamily::Matern32, config);
    const auto b = fit(x, y, KernelFamily::Matern32, config);
    CHECK(a.mu_hat == b.mu_hat);
    CHECK(a.tau2_hat == b.tau2_hat);
    CHECK(a.kernel.theta == b.kernel.theta);
    CHECK(a.tau2_hat > 0.0);

    for (int i = 0; i < 25; ++i)
        CHECK(std::abs(predict_mean(a, x.points.row(i)) - y[i]) < 1e-6);
}

TEST_CASE("fit on constant outputs predicts the constant everywhere") {
    const auto x = realize(random_latin_hypercube(12, 3, RngSeed{21}));
    const Eigen::VectorXd y = Eigen::VectorXd::Constant(12, -2.5);
    const auto model = fit(x, y, KernelFamily::Matern32);
    Eigen::RowVectorXd q(3);
    q << 0.31, 0.62, 0.05;
    CHECK(predict_mean(model, q) == doctest::Approx(-2.5).epsilon(1e-8));
}

TEST_CASE("duplicate rows with a pinned zero nugget are rejected") {
    Design x = realize(random_latin_hypercube(6, 2, RngSeed{22}));
    x.points.row(3) = x.points.row(0);
    const Eigen::VectorXd y = Eigen::VectorXd::LinSpaced(6, 0.0, 1.0);
    FitConfig config;
    config.fixed_eta = 0.0;
    CHECK_THROWS_AS(fit(x, y, KernelFamily::Matern32, config), DegenerateDesignError);
}

TEST_CASE("fitted model beats the constant-mean predictor on a smooth 1D function") {
    const auto x = realize(random_latin_hypercube(30, 1, RngSeed{23}));
    Eigen::VectorXd y(30);
    for (int i = 0; i < 30; ++i) y[i] = std::sin(8.0 * x.points(i, 0));
    const auto model = fit(x, y, KernelFamily::Matern32);

    const auto held_out = realize(random_latin_hypercube(200, 1, RngSeed{24}));
    double sq_model = 0.0;
    double sq_mean = 0.0;
    for (int i = 0; i < 200; ++i) {
        const double truth = std::sin(8.0 * held_out.points(i, 0));
        const double pred = predict_mean(model, held_out.points.row(i));
        sq_model += (pred - truth) * (pred - truth);
        sq_mean += (y.mean() - truth) * (y.mean() - truth);
    }
    CHECK(std::sqrt(sq_model / 200.0) < std::sqrt(sq_mean / 200.0));
}

TEST_CASE("predictions revert to the mean far from the data") {
    // all training points near the origin corner, query at the far corner
    Design x;
    x.points.resize(5, 2);
    x.points << 0.01, 0.02, 0.03, 0.01, 0.02, 0.04, 0.05, 0.03, 0.04, 0.05;
    Eigen::VectorXd y(5);
    y << 1.0, 1.2, 0.8, 1.1, 0.9;
    FitConfig config;
    config.log_theta_lower = std::log(500.0);  // force short correlation lengths
    config.log_theta_upper = std::log(1000.0);
    const auto model = fit(x, y, KernelFamily::Gaussian, config);
    Eigen::RowVectorXd far(2);
    far << 0.99, 0.99;
    CHECK(predict_mean(model, far) == doctest::Approx(model.mu_hat).epsilon(1e-9));
}

TEST_CASE("prediction matches a dense-solve oracle on a 5-point instance") {
    const auto x = design_1d({0.05, 0.3, 0.55, 0.7, 0.9});
    Eigen::VectorXd y(5);
    y << 0.2, 1.4, -0.3, 0.9, 0.5;
    const double eta = 1e-6;
    FitConfig config;
    config.fixed_eta = eta;
    const auto model = fit(x, y, KernelFamily::Matern32, config);

    const DenseRef ref(model.kernel, eta, x);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(5);
    const double mu_ref = y.dot(ref.solve(ones)) / ones.dot(ref.solve(ones));
    const Eigen::VectorXd alpha_ref = ref.solve(Eigen::VectorXd(y.array() - mu_ref));
    Eigen::RowVectorXd q(1);
    q << 0.42;
    double expected = mu_ref;
    for (int i = 0; i < 5; ++i)
        expected += kernel_eval(model.kernel, q, x.points.row(i)) * alpha_ref[i];
    CHECK(predict_mean(model, q) == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("predictions are invariant under training row permutation") {
    const auto x = realize(random_latin_hypercube(15, 2, RngSeed{25}));
    Eigen::VectorXd y(15);
    for (int i = 0; i < 15; ++i) y[i] = x.points(i, 0) * x.points(i, 1) + 0.1 * i;

    Design shuffled = x;
    Eigen::VectorXd y_shuffled = y;
    std::vector<int> perm = {4, 11, 0, 9, 14, 2, 7, 1, 13, 5, 10, 3, 8, 6, 12};
    for (int i = 0; i < 15; ++i) {
        shuffled.points.row(i) = x.points.row(perm[static_cast<std::size_t>(i)]);
        y_shuffled[i] = y[perm[static_cast<std::size_t>(i)]];
    }
    FitConfig config;
    config.fixed_eta = 1e-6;
    const auto a = fit(x, y, KernelFamily::Matern32, config);
    const auto b = fit(shuffled, y_shuffled, KernelFamily::Matern32, config);
    Eigen::RowVectorXd q(2);
    q << 0.37, 0.81;
    CHECK(predict_mean(a, q) == doctest::Approx(predict_mean(b, q)).epsilon(1e-6));
}

TEST_CASE("adding a constant shifts every prediction by that constant") {
    const auto x = realize(random_latin_hypercube(18, 2, RngSeed{26}));
    Eigen::VectorXd y(18);
    for (int i = 0; i < 18; ++i) y[i] = std::sin(3.0 * x.points(i, 0)) * x.points(i, 1);
    const double c = 11.5;

    FitConfig config;
    config.seed = RngSeed{2};
    const auto a = fit(x, y, KernelFamily::Matern32, config);
    const auto b = fit(x, Eigen::VectorXd(y.array() + c), KernelFamily::Matern32, config);
    CHECK(b.mu_hat - a.mu_hat == doctest::Approx(c).epsilon(1e-9));
    for (const double t : {0.1, 0.5, 0.9}) {
        Eigen::RowVectorXd q(2);
        q << t, 1.0 - t;
        CHECK(predict_mean(b, q) - predict_mean(a, q) == doctest::Approx(c).epsilon(1e-9));
    }
}

TEST_CASE("model JSON round-trips through the self-contained form") {
    const auto x = realize(random_latin_hypercube(10, 2, RngSeed{27}));
    Eigen::VectorXd y(10);
    for (int i = 0; i < 10; ++i) y[i] = x.points(i, 0) + 2.0 * x.points(i, 1);
    const auto model = fit(x, y, KernelFamily::Gaussian);
    const auto text = gp_model_to_json(model, /*include_training=*/true);
    const auto back = gp_model_from_json(text);
    Eigen::RowVectorXd q(2);
    q << 0.25, 0.66;
    CHECK(predict_mean(back, q) == doctest::Approx(predict_mean(model, q)).epsilon(1e-12));

    const auto summary = gp_model_to_json(model);
    CHECK(summary.find("train_x") == std::string::npos);
    CHECK_THROWS_AS(gp_model_from_json(summary), std::invalid_argument);
}
