#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "doctest.h"
#include "oracles.hpp"

#include "d2emo/doe.hpp"
#include "d2emo/problems.hpp"
#include "d2emo/surrogate.hpp"

using namespace d2emo;

namespace {

double scalar_rbf(const Vector& a, const Vector& b, double gamma, double ell) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d2 += (a[i] - b[i]) * (a[i] - b[i]);
    return gamma * std::exp(-d2 / ell);
}

// Weights as the model defines them: solve with the jittered matrix, then up
// to ten refinement steps against the exact one while the targets are missed
// by more than 1e-6. LU here, Cholesky in the library.
Eigen::VectorXd refined_weights(const Eigen::MatrixXd& exact, double jitter, const Eigen::VectorXd& y) {
    const Eigen::Index N = exact.rows();
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(exact + jitter * Eigen::MatrixXd::Identity(N, N));
    Eigen::VectorXd a = lu.solve(y);
    for (int k = 0; k < 10 && (y - exact * a).cwiseAbs().maxCoeff() > 1e-6; ++k) a += lu.solve(Eigen::VectorXd(y - exact * a));
    return a;
}

// Dense recomputation of mean and variance from the model's public state.
std::pair<double, double> dense_prediction(const GpSurrogate& g, const Vector& z) {
    const auto X = g.training_inputs();
    const auto& p = g.params();
    const auto N = static_cast<Eigen::Index>(X.size());
    Eigen::MatrixXd K(N, N);
    Eigen::VectorXd k(N), y(N);
    for (Eigen::Index i = 0; i < N; ++i) {
        k(i) = scalar_rbf(z, X[i], p.gamma, p.ell);
        y(i) = (g.training_targets()[i] - g.standardization().mean) / g.standardization().scale;
        for (Eigen::Index j = 0; j < N; ++j) K(i, j) = scalar_rbf(X[i], X[j], p.gamma, p.ell);
    }
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(K + g.jitter() * Eigen::MatrixXd::Identity(N, N));
    const double s = g.standardization().scale;
    const double mean = g.standardization().mean + s * k.dot(refined_weights(K, g.jitter(), y));
    const double var = std::max(0.0, s * s * (p.gamma - k.dot(lu.solve(k))));
    return {mean, var};
}

std::vector<Vector> random_points(std::mt19937_64& gen, std::size_t N, std::size_t n) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Vector> X(N, Vector(n));
    for (auto& x : X)
        for (auto& v : x) v = u(gen);
    return X;
}

// Jitter-escalated, refined solve on E = exp(-D / ell); returns max |y - E alpha|,
// the amount by which the regularized mean misses the standardized targets.
double interpolation_gap(const std::vector<Vector>& X, const Vector& f, double ell) {
    const auto N = static_cast<Eigen::Index>(X.size());
    const auto st = standardize(f);
    Eigen::MatrixXd E(N, N);
    Eigen::VectorXd y(N);
    for (Eigen::Index i = 0; i < N; ++i) {
        y(i) = (f[i] - st.mean) / st.scale;
        for (Eigen::Index j = 0; j < N; ++j) E(i, j) = scalar_rbf(X[i], X[j], 1.0, ell);
    }
    for (double jit = 1e-8; jit <= 1e-2 * 1.000001; jit *= 10.0) {
        const Eigen::LLT<Eigen::MatrixXd> llt(E + jit * Eigen::MatrixXd::Identity(N, N));
        if (llt.info() == Eigen::Success) return (y - E * refined_weights(E, jit, y)).cwiseAbs().maxCoeff();
    }
    return INFINITY;
}

}  // namespace

TEST_CASE("kernel examples") {
    const Vector x{0.3, -1.0};
    CHECK(kernel(x, x, {2.0, 1.0, 0.0}) == 2.0);
    CHECK(kernel(Vector{0.0, 0.0}, Vector{1.0, 1.0}, {1.0, 2.0, 0.0}) == doctest::Approx(std::exp(-1.0)));
    std::mt19937_64 gen(1);
    for (int t = 0; t < 100; ++t) {
        const auto P = random_points(gen, 2, 4);
        const KernelParams p{0.5 + t, 0.01 * (t + 1), 0.0};
        const double v = kernel(P[0], P[1], p);
        CHECK(v == doctest::Approx(scalar_rbf(P[0], P[1], p.gamma, p.ell)).epsilon(1e-14));
        CHECK(v == kernel(P[1], P[0], p));
        CHECK((v > 0.0 && v <= p.gamma));
    }
}

TEST_CASE("log marginal likelihood matches the 2x2 closed form") {
    const std::vector<Vector> X{{0.0}, {0.5}};
    const Vector f{1.0, 3.0};
    const KernelParams p{1.7, 0.3, 0.0};
    // standardized targets are -1, +1
    const double j = 1e-8 * p.gamma;
    const double a = p.gamma + j, b = p.gamma * std::exp(-0.25 / 0.3);
    const double det = a * a - b * b;
    const double quad = (a * 1.0 + a * 1.0 + 2.0 * b * 1.0) / det;  // y = (-1, 1), y^T K^-1 y
    const double expected = -0.5 * quad - 0.5 * std::log(det) - std::log(2.0 * std::numbers::pi);
    CHECK(log_marginal_likelihood(p, X, f) == doctest::Approx(expected).epsilon(1e-9));
    CHECK_THROWS(log_marginal_likelihood(p, {{0.0}}, Vector{1.0}));
}

TEST_CASE("fitter agrees with a log-spaced grid search") {
    std::mt19937_64 gen(3);
    const auto X = random_points(gen, 25, 2);
    Vector f(X.size());
    for (std::size_t i = 0; i < X.size(); ++i) f[i] = std::sin(3.0 * X[i][0]) + X[i][1] * X[i][1];
    const auto model = GpSurrogate::fit(X, f);
    const double fitted = log_marginal_likelihood(model.params(), X, f);

    // the fitter only admits length scales whose jittered mean interpolates
    constexpr double step = 0.25;
    double best = -INFINITY, best_lg = 0.0, best_ll = 0.0;
    for (double ll = -5.0; ll <= 5.0 + 1e-9; ll += step) {
        if (interpolation_gap(X, f, std::pow(10.0, ll)) > 1e-6) continue;
        for (double lg = -5.0; lg <= 5.0 + 1e-9; lg += step) {
            double v = -INFINITY;
            try {
                v = log_marginal_likelihood({std::pow(10.0, lg), std::pow(10.0, ll), 0.0}, X, f);
            } catch (const FitError&) {
            }
            if (v > best) {
                best = v;
                best_lg = lg;
                best_ll = ll;
            }
        }
    }
    CHECK(interpolation_gap(X, f, model.params().ell) <= 1e-6 * (1.0 + 1e-3));
    CHECK(fitted >= best - 1e-6);
    CHECK(std::fabs(std::log10(model.params().gamma) - best_lg) <= step + 1e-9);
    CHECK(std::fabs(std::log10(model.params().ell) - best_ll) <= step + 1e-9);
}

TEST_CASE("fit recovers the length scale of a synthetic GP draw") {
    std::mt19937_64 gen(17);
    std::normal_distribution<double> normal;
    for (double ell : {0.02, 0.1, 0.5}) {
        const auto X = random_points(gen, 40, 2);
        const auto N = static_cast<Eigen::Index>(X.size());
        Eigen::MatrixXd K(N, N);
        for (Eigen::Index i = 0; i < N; ++i)
            for (Eigen::Index j = 0; j < N; ++j) K(i, j) = scalar_rbf(X[i], X[j], 1.0, ell) + (i == j ? 1e-8 : 0.0);
        const Eigen::MatrixXd L = K.llt().matrixL();
        Eigen::VectorXd e(N);
        for (auto& v : e) v = normal(gen);
        const Eigen::VectorXd draw = L * e;
        const Vector f(draw.data(), draw.data() + N);
        const auto model = GpSurrogate::fit(X, f);
        CAPTURE(model.params().ell);
        CHECK(std::fabs(std::log10(model.params().ell / ell)) <= 1.0);
    }
}

TEST_CASE("fit is deterministic and interpolates ZDT3 f1") {
    const Problem zdt3 = make_problem("zdt3", 3);
    const auto X = lhs_sample({32, zdt3.bounds(), 8});
    Vector f1;
    for (const auto& x : X) f1.push_back(zdt3.evaluate(x)[0]);
    const auto a = GpSurrogate::fit(X, f1);
    const auto b = GpSurrogate::fit(X, f1);
    CHECK(a.params() == b.params());
    for (std::size_t i = 0; i < X.size(); ++i) CHECK(std::fabs(a.predict_mean(X[i]) - f1[i]) < 1e-6);
    const auto p = a.params();
    CHECK((p.gamma >= kHyperMin && p.gamma <= kHyperMax && p.ell >= kHyperMin && p.ell <= kHyperMax));
}

TEST_CASE("clustered designs: capped fit interpolates, uncapped fit stays smooth") {
    // pairs 1e-3 apart make long scales ill-conditioned
    std::mt19937_64 gen(23);
    std::normal_distribution<double> normal;
    auto X = random_points(gen, 30, 3);
    for (std::size_t i = 0; i < 30; ++i) {
        Vector x = X[i];
        for (auto& v : x) v = std::clamp(v + 6e-4 * normal(gen), 0.0, 1.0);
        X.push_back(x);
    }
    auto target = [](const Vector& x) { return x[0] + 0.5 * x[1]; };
    Vector f;
    for (const auto& x : X) f.push_back(target(x));
    const auto probes = random_points(gen, 500, 3);
    auto relative_error = [&](const GpSurrogate& g) {
        double se = 0.0, tot = 0.0;
        for (const auto& z : probes) {
            se += std::pow(g.predict_mean(z) - target(z), 2);
            tot += std::pow(target(z) - 0.75, 2);
        }
        return se / tot;
    };

    const auto capped = GpSurrogate::fit(X, f);
    CAPTURE(capped.params().ell);
    for (std::size_t i = 0; i < X.size(); ++i)
        CHECK(std::fabs(capped.predict_mean(X[i]) - f[i]) <= 1e-6 * capped.standardization().scale);

    FitOptions free;
    free.interpolation_cap = false;
    const auto smooth = GpSurrogate::fit(X, f, free);
    CAPTURE(smooth.params().ell);
    CHECK(smooth.params().ell > capped.params().ell);
    CHECK(log_marginal_likelihood(smooth.params(), X, f) >= log_marginal_likelihood(capped.params(), X, f));
    CHECK(relative_error(smooth) < 1e-3);
    CHECK(relative_error(smooth) <= relative_error(capped));
}

TEST_CASE("constant targets give a constant model") {
    const std::vector<Vector> X{{0.0, 0.0}, {0.5, 0.1}, {1.0, 0.9}};
    const auto g = GpSurrogate::fit(X, Vector{4.2, 4.2, 4.2});
    CHECK(g.is_constant());
    for (const Vector z : {Vector{0.3, 0.3}, Vector{0.9, 0.0}, Vector{1.0, 0.9}}) {
        CHECK(g.predict_mean(z) == doctest::Approx(4.2).epsilon(1e-12));
        for (double v : g.grad_mean(z)) CHECK(std::fabs(v) < 1e-12);
    }
    CHECK_THROWS(GpSurrogate::fit({{0.0}}, Vector{1.0}));
}

TEST_CASE("predictions match dense linear algebra") {
    std::mt19937_64 gen(23);
    std::uniform_real_distribution<double> u(-0.2, 1.2);
    for (std::size_t n : {1u, 3u, 5u}) {
        const auto model = oracle::random_model(gen, n, 30);
        const double prior = model.params().gamma * model.standardization().scale * model.standardization().scale;
        for (int t = 0; t < 50; ++t) {
            Vector z(n);
            for (auto& v : z) v = u(gen);
            const auto [mean, var] = dense_prediction(model, z);
            CHECK(model.predict_mean(z) == doctest::Approx(mean).epsilon(1e-7).scale(1.0));
            CHECK(model.predict_variance(z) == doctest::Approx(var).epsilon(1e-6).scale(prior));
            CHECK(model.predict_variance(z) >= 0.0);
            CHECK(model.predict_variance(z) <= prior * (1.0 + 1e-12));
        }
        // interpolation is guaranteed for fitted hyperparameters
        const auto X = model.training_inputs();
        const auto fitted = GpSurrogate::fit(X, model.training_targets());
        const double fprior = fitted.params().gamma * std::pow(fitted.standardization().scale, 2);
        for (std::size_t i = 0; i < X.size(); ++i) {
            CHECK(std::fabs(fitted.predict_mean(X[i]) - model.training_targets()[i]) <= 1e-6 * fitted.standardization().scale);
            CHECK(fitted.predict_variance(X[i]) <= 1e-6 * fprior);
        }
        const Vector far(n, 1e3);
        CHECK(model.predict_mean(far) == doctest::Approx(model.standardization().mean));
        CHECK(model.predict_variance(far) == doctest::Approx(prior));
    }
}

TEST_CASE("cholesky factor reconstructs the regularized covariance") {
    std::mt19937_64 gen(29);
    const auto model = oracle::random_model(gen, 3, 40);
    const Eigen::MatrixXd L = model.cholesky_factor();
    const Eigen::MatrixXd K = model.covariance();
    CHECK((L * L.transpose() - K).norm() / K.norm() < 1e-8);
}

TEST_CASE("mean gradient: one-point closed form and finite differences") {
    const std::vector<Vector> X{{0.2, 0.7}};
    const KernelParams p{1.5, 0.4, 0.0};
    const Standardization st{1.0, 2.0};
    const auto g = GpSurrogate::condition(p, X, Vector{3.0}, st);
    CHECK(g.grad_mean(X[0]) == Vector{0.0, 0.0});
    const Vector z{0.5, 0.1};
    const double y0 = (3.0 - st.mean) / st.scale;
    const double kz = scalar_rbf(z, X[0], p.gamma, p.ell);
    const auto grad = g.grad_mean(z);
    for (std::size_t i = 0; i < 2; ++i) {
        const double expected = y0 / (p.gamma + g.jitter()) * kz * (-2.0 / p.ell) * (z[i] - X[0][i]) * st.scale;
        CHECK(grad[i] == doctest::Approx(expected).epsilon(1e-10));
    }

    std::mt19937_64 gen(31);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t n : {2u, 4u}) {
        const auto model = oracle::random_model(gen, n, 25);
        for (int t = 0; t < 40; ++t) {
            Vector zz(n);
            for (auto& v : zz) v = u(gen);
            const auto fd = oracle::fd_gradient([&](const Vector& q) { return model.predict_mean(q); }, zz, 1e-5);
            const auto an = model.grad_mean(zz);
            Vector combined(n);
            const double m = model.mean_and_gradient(zz, combined);
            CHECK(m == doctest::Approx(model.predict_mean(zz)).epsilon(1e-12));
            double diff = 0.0, norm = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                diff += (an[i] - fd[i]) * (an[i] - fd[i]);
                norm += an[i] * an[i];
                CHECK(combined[i] == doctest::Approx(an[i]).epsilon(1e-12));
            }
            if (std::sqrt(norm) < 1e-10) CHECK(std::sqrt(diff) < 1e-8);
            else CHECK(std::sqrt(diff / norm) < 1e-4);
        }
    }
}

TEST_CASE("json round trip preserves predictions") {
    std::mt19937_64 gen(37);
    const auto model = oracle::random_model(gen, 3, 20);
    const auto copy = GpSurrogate::from_json(model.to_json());
    CHECK(copy.params() == model.params());
    CHECK(copy.to_json() == model.to_json());
    const Vector z{0.3, 0.6, 0.9};
    CHECK(copy.predict_mean(z) == model.predict_mean(z));
    CHECK(copy.predict_variance(z) == model.predict_variance(z));
    CHECK_THROWS(GpSurrogate::from_json("{\"kernel\":\"matern\"}"));
}
