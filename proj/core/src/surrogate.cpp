#include "d2emo/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "json.hpp"

namespace d2emo {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr double kJitterStart = 1e-8;
constexpr double kJitterMax = 1e-2;
constexpr double kConstantStd = 1e-12;
// Largest tolerated gap between the jittered interpolant and the standardized
// targets at the training inputs.
constexpr double kInterpolationTol = 1e-6;
constexpr double kLog2Pi = 1.8378770664093453;

RowMatrix to_matrix(const std::vector<Vector>& X) {
    if (X.empty()) throw std::invalid_argument("GP: no training inputs");
    RowMatrix M(static_cast<Eigen::Index>(X.size()), static_cast<Eigen::Index>(X.front().size()));
    for (std::size_t i = 0; i < X.size(); ++i) {
        if (X[i].size() != X.front().size()) throw std::invalid_argument("GP: ragged training inputs");
        for (std::size_t j = 0; j < X[i].size(); ++j) M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = X[i][j];
    }
    return M;
}

Eigen::MatrixXd squared_distances(const RowMatrix& X) {
    const Eigen::Index n = X.rows();
    Eigen::MatrixXd D(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        D(i, i) = 0.0;
        for (Eigen::Index j = 0; j < i; ++j) {
            const double d = (X.row(i) - X.row(j)).squaredNorm();
            D(i, j) = d;
            D(j, i) = d;
        }
    }
    return D;
}

// Factorizes base + j*scale*I for j = 1e-8, 1e-7, ..., 1e-2. Returns the
// absolute jitter used, or a negative value if every attempt failed.
double factorize_with_jitter(const Eigen::MatrixXd& base, double scale, Eigen::LLT<Eigen::MatrixXd>& llt) {
    Eigen::MatrixXd A = base;
    for (double j = kJitterStart; j <= kJitterMax * (1.0 + 1e-9); j *= 10.0) {
        A.diagonal() = base.diagonal().array() + j * scale;
        llt.compute(A);
        if (llt.info() == Eigen::Success) return j * scale;
    }
    return -1.0;
}

// Solve (A + jI) a = y and, while it misses y by more than the interpolation
// tolerance, refine against A itself. The error along an eigenvector of A
// shrinks by j / (lambda + j) per step, so directions well above the jitter
// end up solved exactly; only numerically singular ones keep the
// regularization. Returns max |y - A a|.
double refined_solve(const Eigen::MatrixXd& A, const Eigen::LLT<Eigen::MatrixXd>& llt, const Eigen::VectorXd& y,
                     Eigen::VectorXd& a) {
    constexpr int kRefinementSteps = 10;
    a = llt.solve(y);
    Eigen::VectorXd r = y - A * a;
    for (int k = 0; k < kRefinementSteps && r.cwiseAbs().maxCoeff() > kInterpolationTol; ++k) {
        a += llt.solve(r);
        r = y - A * a;
    }
    return r.cwiseAbs().maxCoeff();
}

Eigen::VectorXd standardized_targets(std::span<const double> f, const Standardization& s) {
    Eigen::VectorXd y(static_cast<Eigen::Index>(f.size()));
    for (std::size_t i = 0; i < f.size(); ++i) y(static_cast<Eigen::Index>(i)) = (f[i] - s.mean) / s.scale;
    return y;
}

// LML as a function of (log10 gamma, log10 ell) with sigma_n = 0. Since the
// jitter is proportional to gamma, K = gamma * (E + j I) with E = exp(-D/ell),
// so a single factorization per ell serves every gamma.
class LikelihoodProfile {
public:
    LikelihoodProfile(Eigen::MatrixXd distances, Eigen::VectorXd y)
        : D_(std::move(distances)), y_(std::move(y)), n_(static_cast<double>(y_.size())) {}

    double operator()(double log_gamma, double log_ell) {
        prepare(log_ell);
        if (!ok_) return -std::numeric_limits<double>::infinity();
        const double gamma = std::pow(10.0, log_gamma);
        return -0.5 * quad_ / gamma - 0.5 * n_ * std::log(gamma) - 0.5 * logdet_ - 0.5 * n_ * kLog2Pi;
    }

    /// max_i |y_i - (E alpha)_i| after the refined solve; independent of gamma.
    /// Infinite when the factorization fails.
    double interpolation_residual(double log_ell) {
        prepare(log_ell);
        if (!ok_) return std::numeric_limits<double>::infinity();
        if (std::isnan(residual_)) {
            Eigen::VectorXd a;
            residual_ = refined_solve(E_, llt_, y_, a);
        }
        return residual_;
    }

private:
    void prepare(double log_ell) {
        if (log_ell == cached_log_ell_) return;
        cached_log_ell_ = log_ell;
        const double ell = std::pow(10.0, log_ell);
        E_ = (-D_.array() / ell).exp().matrix();
        ok_ = factorize_with_jitter(E_, 1.0, llt_) > 0.0;
        residual_ = std::numeric_limits<double>::quiet_NaN();
        if (!ok_) return;
        // the likelihood is that of the jittered matrix, matching its log-determinant
        quad_ = y_.dot(llt_.solve(y_));
        logdet_ = 2.0 * llt_.matrixLLT().diagonal().array().log().sum();
        ok_ = std::isfinite(quad_) && std::isfinite(logdet_);
    }

    Eigen::MatrixXd D_;
    Eigen::VectorXd y_;
    double n_;
    double cached_log_ell_ = std::numeric_limits<double>::quiet_NaN();
    bool ok_ = false;
    double quad_ = 0.0;
    double logdet_ = 0.0;
    double residual_ = 0.0;  // NaN until requested for the cached ell
    Eigen::MatrixXd E_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
};

struct Point2 {
    double log_gamma;
    double log_ell;
};

// Coordinate-wise golden-section ascent from one start, under a fixed
// evaluation budget. Returns the best point seen and its value.
std::pair<Point2, double> golden_coordinate_ascent(LikelihoodProfile& lml, Point2 start, std::size_t budget,
                                                   double ell_hi) {
    const double lo = std::log10(kHyperMin);
    const double hi = std::log10(kHyperMax);
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    constexpr std::size_t kPerLine = 10;

    std::size_t used = 0;
    Point2 best = start;
    double best_value = lml(start.log_gamma, start.log_ell);
    ++used;

    auto eval = [&](Point2 p) {
        const double v = lml(p.log_gamma, p.log_ell);
        ++used;
        if (v > best_value) {
            best_value = v;
            best = p;
        }
        return v;
    };

    double width = 2.0;
    while (used < budget) {
        for (int coord = 0; coord < 2 && used < budget; ++coord) {
            // coord 0 moves ell, coord 1 moves gamma
            const Point2 center = best;
            auto at = [&](double t) {
                Point2 p = center;
                (coord == 0 ? p.log_ell : p.log_gamma) = t;
                return p;
            };
            const double c = coord == 0 ? center.log_ell : center.log_gamma;
            double a = std::max(lo, c - width);
            double b = std::min(coord == 0 ? ell_hi : hi, c + width);
            const std::size_t line_budget = std::min(kPerLine, budget - used);
            if (line_budget < 2) {
                eval(at(0.5 * (a + b)));
                continue;
            }
            double x1 = b - r * (b - a);
            double x2 = a + r * (b - a);
            double f1 = eval(at(x1));
            double f2 = eval(at(x2));
            for (std::size_t k = 2; k < line_budget; ++k) {
                if (f1 > f2) {
                    b = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = b - r * (b - a);
                    f1 = eval(at(x1));
                } else {
                    a = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = a + r * (b - a);
                    f2 = eval(at(x2));
                }
            }
        }
        width = std::max(0.5 * width, 0.05);
    }
    return {best, best_value};
}

}  // namespace

double kernel(std::span<const double> x, std::span<const double> x2, const KernelParams& params) {
    if (x.size() != x2.size()) throw std::invalid_argument("kernel: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - x2[i];
        s += d * d;
    }
    return params.gamma * std::exp(-s / params.ell);
}

Standardization standardize(std::span<const double> f) {
    if (f.empty()) throw std::invalid_argument("standardize: empty targets");
    double mean = 0.0;
    for (double v : f) mean += v;
    mean /= static_cast<double>(f.size());
    double var = 0.0;
    for (double v : f) var += (v - mean) * (v - mean);
    var /= static_cast<double>(f.size());
    const double sd = std::sqrt(var);
    return {mean, sd < kConstantStd ? 1.0 : sd};
}

double log_marginal_likelihood(const KernelParams& params, const std::vector<Vector>& X,
                               std::span<const double> f) {
    if (X.size() < 2) throw std::invalid_argument("log_marginal_likelihood: need at least 2 training points");
    if (X.size() != f.size()) throw std::invalid_argument("log_marginal_likelihood: X/f size mismatch");
    const RowMatrix M = to_matrix(X);
    const Eigen::VectorXd y = standardized_targets(f, standardize(f));
    Eigen::MatrixXd K = params.gamma * (-squared_distances(M).array() / params.ell).exp().matrix();
    K.diagonal().array() += params.sigma_n * params.sigma_n;
    Eigen::LLT<Eigen::MatrixXd> llt;
    if (factorize_with_jitter(K, params.gamma, llt) < 0.0)
        throw FitError("log_marginal_likelihood: covariance not positive definite after jitter escalation");
    const double n = static_cast<double>(y.size());
    return -0.5 * y.dot(llt.solve(y)) - llt.matrixLLT().diagonal().array().log().sum() - 0.5 * n * kLog2Pi;
}

GpSurrogate GpSurrogate::condition(const KernelParams& params, const std::vector<Vector>& X,
                                   std::span<const double> f, Standardization standardization) {
    if (X.size() != f.size()) throw std::invalid_argument("GpSurrogate: X/f size mismatch");
    if (!(params.gamma > 0.0) || !(params.ell > 0.0)) throw std::invalid_argument("GpSurrogate: gamma and ell must be positive");
    if (!(standardization.scale > 0.0)) throw std::invalid_argument("GpSurrogate: standardization scale must be positive");

    GpSurrogate gp;
    gp.params_ = params;
    gp.standardization_ = standardization;
    gp.X_ = to_matrix(X);
    gp.targets_.assign(f.begin(), f.end());

    Eigen::MatrixXd K = params.gamma * (-squared_distances(gp.X_).array() / params.ell).exp().matrix();
    K.diagonal().array() += params.sigma_n * params.sigma_n;
    gp.jitter_ = factorize_with_jitter(K, params.gamma, gp.chol_);
    if (gp.jitter_ < 0.0) {
        throw FitError("GpSurrogate: covariance not positive definite after jitter escalation (gamma=" +
                       std::to_string(params.gamma) + ", ell=" + std::to_string(params.ell) + ")");
    }
    refined_solve(K, gp.chol_, standardized_targets(f, standardization), gp.alpha_);
    return gp;
}

GpSurrogate GpSurrogate::fit(const std::vector<Vector>& X, std::span<const double> f, const FitOptions& options) {
    if (X.size() < 2) throw std::invalid_argument("GpSurrogate::fit: need at least 2 training points");
    if (X.size() != f.size()) throw std::invalid_argument("GpSurrogate::fit: X/f size mismatch");
    if (options.starts == 0 || options.evaluations_per_start == 0)
        throw std::invalid_argument("GpSurrogate::fit: starts and evaluations must be positive");
    for (double v : f) {
        if (!std::isfinite(v)) throw std::invalid_argument("GpSurrogate::fit: non-finite target");
    }

    const Standardization s = standardize(f);
    {
        double mean = 0.0, var = 0.0;
        for (double v : f) mean += v;
        mean /= static_cast<double>(f.size());
        for (double v : f) var += (v - mean) * (v - mean);
        if (std::sqrt(var / static_cast<double>(f.size())) < kConstantStd) {
            GpSurrogate gp = condition(KernelParams{}, X, f, s);
            gp.constant_ = true;
            return gp;
        }
    }

    const RowMatrix M = to_matrix(X);
    LikelihoodProfile lml(squared_distances(M), standardized_targets(f, s));

    // Long length scales make E nearly singular; the jitter then acts as noise
    // and the mean stops interpolating. Cap log10(ell) at the largest value
    // whose jittered solve still reproduces the targets (bisection; assumes the
    // residual grows with ell). If even the shortest scale fails, no cap.
    const double log_lo = std::log10(kHyperMin);
    double ell_hi = std::log10(kHyperMax);
    if (options.interpolation_cap && lml.interpolation_residual(ell_hi) > kInterpolationTol &&
        lml.interpolation_residual(log_lo) <= kInterpolationTol) {
        double a = log_lo, b = ell_hi;
        while (b - a > 1e-3) {
            const double mid = 0.5 * (a + b);
            (lml.interpolation_residual(mid) <= kInterpolationTol ? a : b) = mid;
        }
        ell_hi = a;
    }

    // log-spaced starts for ell across [1e-3, 1e4] (clamped to the cap); gamma
    // starts at 1 since targets are standardized
    Point2 best{0.0, 0.0};
    double best_value = -std::numeric_limits<double>::infinity();
    const double first = -3.0, last = 4.0;
    for (std::size_t i = 0; i < options.starts; ++i) {
        const double t = options.starts == 1 ? 0.5 : static_cast<double>(i) / static_cast<double>(options.starts - 1);
        const Point2 start{0.0, std::min(ell_hi, first + t * (last - first))};
        const auto [p, v] = golden_coordinate_ascent(lml, start, options.evaluations_per_start, ell_hi);
        if (v > best_value) {
            best_value = v;
            best = p;
        }
    }
    if (!std::isfinite(best_value)) {
        throw FitError("GpSurrogate::fit: covariance not positive definite for every start (N=" +
                       std::to_string(X.size()) + "); training inputs may contain near-duplicates");
    }
    KernelParams params;
    params.gamma = std::pow(10.0, best.log_gamma);
    params.ell = std::pow(10.0, best.log_ell);
    return condition(params, X, f, s);
}

void GpSurrogate::cross_covariance(std::span<const double> z, Eigen::VectorXd& k) const {
    if (z.size() != dimension()) throw std::invalid_argument("GpSurrogate: query dimension mismatch");
    const Eigen::Map<const Eigen::RowVectorXd> zv(z.data(), static_cast<Eigen::Index>(z.size()));
    k = params_.gamma * (-(X_.rowwise() - zv).rowwise().squaredNorm().array() / params_.ell).exp();
}

double GpSurrogate::predict_mean(std::span<const double> z) const {
    Eigen::VectorXd k;
    cross_covariance(z, k);
    return standardization_.mean + standardization_.scale * k.dot(alpha_);
}

double GpSurrogate::predict_variance(std::span<const double> z) const {
    Eigen::VectorXd k;
    cross_covariance(z, k);
    const Eigen::VectorXd v = chol_.matrixL().solve(k);
    const double var = params_.gamma - v.squaredNorm();
    return std::max(0.0, var) * standardization_.scale * standardization_.scale;
}

double GpSurrogate::mean_and_gradient(std::span<const double> z, std::span<double> gradient) const {
    if (gradient.size() != dimension()) throw std::invalid_argument("GpSurrogate: gradient buffer size mismatch");
    Eigen::VectorXd k;
    cross_covariance(z, k);
    const Eigen::VectorXd w = k.cwiseProduct(alpha_);
    const Eigen::Map<const Eigen::RowVectorXd> zv(z.data(), static_cast<Eigen::Index>(z.size()));
    // d/dz sum_i w_i = sum_i alpha_i k_i * (-2/ell) (z - x_i)
    const Eigen::RowVectorXd g = (-2.0 / params_.ell) * (w.sum() * zv - w.transpose() * X_);
    for (std::size_t j = 0; j < gradient.size(); ++j) gradient[j] = standardization_.scale * g(static_cast<Eigen::Index>(j));
    return standardization_.mean + standardization_.scale * w.sum();
}

Vector GpSurrogate::grad_mean(std::span<const double> z) const {
    Vector g(dimension());
    mean_and_gradient(z, g);
    return g;
}

std::vector<Vector> GpSurrogate::training_inputs() const {
    std::vector<Vector> out(size(), Vector(dimension()));
    for (std::size_t i = 0; i < size(); ++i)
        for (std::size_t j = 0; j < dimension(); ++j) out[i][j] = X_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    return out;
}

Eigen::MatrixXd GpSurrogate::covariance() const {
    Eigen::MatrixXd K = params_.gamma * (-squared_distances(X_).array() / params_.ell).exp().matrix();
    K.diagonal().array() += params_.sigma_n * params_.sigma_n + jitter_;
    return K;
}

std::string GpSurrogate::to_json() const {
    nlohmann::ordered_json j;
    j["kernel"] = "rbf";
    j["gamma"] = params_.gamma;
    j["ell"] = params_.ell;
    j["sigma_n"] = params_.sigma_n;
    j["y_mean"] = standardization_.mean;
    j["y_std"] = standardization_.scale;
    j["constant"] = constant_;
    j["jitter"] = jitter_;
    j["X"] = training_inputs();
    j["y"] = targets_;
    return j.dump();
}

GpSurrogate GpSurrogate::from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    if (j.at("kernel").get<std::string>() != "rbf") throw std::invalid_argument("GpSurrogate::from_json: unsupported kernel");
    KernelParams p;
    p.gamma = j.at("gamma").get<double>();
    p.ell = j.at("ell").get<double>();
    p.sigma_n = j.value("sigma_n", 0.0);
    const Standardization s{j.at("y_mean").get<double>(), j.at("y_std").get<double>()};
    const auto X = j.at("X").get<std::vector<Vector>>();
    const auto y = j.at("y").get<Vector>();
    GpSurrogate gp = condition(p, X, y, s);
    gp.constant_ = j.value("constant", false);
    return gp;
}

}  // namespace d2emo
