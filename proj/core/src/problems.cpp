#include "d2emo/problems.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace d2emo {

namespace {

using std::numbers::pi;

Bounds make_bounds(ProblemFamily family, std::size_t n) {
    if (family == ProblemFamily::wfg2) {
        Vector upper(n);
        for (std::size_t i = 0; i < n; ++i) upper[i] = 2.0 * static_cast<double>(i + 1);
        return Bounds(Vector(n, 0.0), std::move(upper));
    }
    return Bounds::unit(n);
}

// WFG transformations used by WFG2
double s_linear(double y, double a) { return std::abs(y - a) / std::abs(std::floor(a - y) + a); }

double r_nonsep_pair(double a, double b) { return (a + b + 2.0 * std::abs(a - b)) / 3.0; }

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

Vector zdt3(std::span<const double> x, int k) {
    const double f1 = x[0];
    double s = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) s += x[i];
    const double g = 1.0 + 9.0 * s / static_cast<double>(x.size() - 1);
    const double r = f1 / g;
    const double h = 1.0 - std::sqrt(r) - r * std::sin(10.0 * k * pi * f1);
    return {f1, g * h};
}

Vector dtlz7(std::span<const double> x, int k) {
    const double f1 = x[0];
    double s = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) s += x[i];
    const double g = 1.0 + 9.0 * s / static_cast<double>(x.size() - 1);
    const double h = 2.0 - f1 / (1.0 + g) * (1.0 + std::sin(3.0 * k * pi * f1));
    return {f1, (1.0 + g) * h};
}

// WFG2 with two position parameters. An odd number of distance parameters
// leaves a final singleton group, on which the non-separable reduction is the
// identity.
Vector wfg2(std::span<const double> z, int k) {
    constexpr std::size_t kPos = 2;
    const std::size_t n = z.size();
    Vector y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = z[i] / (2.0 * static_cast<double>(i + 1));
    for (std::size_t i = kPos; i < n; ++i) y[i] = clamp01(s_linear(y[i], 0.35));

    double dist_sum = 0.0;
    std::size_t groups = 0;
    for (std::size_t i = kPos; i < n; i += 2, ++groups) {
        dist_sum += i + 1 < n ? clamp01(r_nonsep_pair(y[i], y[i + 1])) : y[i];
    }
    const double t1 = clamp01(0.5 * (y[0] + y[1]));
    const double t2 = clamp01(dist_sum / static_cast<double>(groups));

    const double x1 = t1;  // degeneracy constant A = 1
    const double xm = t2;
    const double A = 5.0 * k;
    const double c = std::cos(A * pi * x1);
    const double convex = 1.0 - std::cos(x1 * pi / 2.0);
    const double disc = 1.0 - x1 * c * c;
    return {xm + 2.0 * convex, xm + 4.0 * disc};
}

ProblemFamily parse_family(std::string_view s) {
    if (s == "zdt3") return ProblemFamily::zdt3;
    if (s == "dtlz7") return ProblemFamily::dtlz7;
    if (s == "wfg2") return ProblemFamily::wfg2;
    throw std::invalid_argument("unknown problem '" + std::string(s) + "'");
}

const char* family_name(ProblemFamily f) {
    switch (f) {
        case ProblemFamily::zdt3: return "zdt3";
        case ProblemFamily::dtlz7: return "dtlz7";
        case ProblemFamily::wfg2: return "wfg2";
    }
    return "?";
}

}  // namespace

Problem::Problem(ProblemFamily family, std::size_t n, int disconnect_param)
    : family_(family), n_(n), k_(disconnect_param), bounds_(make_bounds(family, std::max<std::size_t>(n, 1))) {
    if (k_ < 1) throw std::invalid_argument("Problem: disconnect_param must be >= 1");
    const std::size_t min_n = family == ProblemFamily::wfg2 ? 3 : 2;
    if (n_ < min_n)
        throw std::invalid_argument(std::string("Problem: ") + family_name(family) + " needs n >= " + std::to_string(min_n));
}

std::string Problem::name() const {
    std::string s = family_name(family_);
    if (k_ != 1) s += "-k" + std::to_string(k_);
    return s;
}

Vector Problem::evaluate(std::span<const double> x) const {
    if (!bounds_.contains(x)) throw std::invalid_argument("Problem::evaluate: x outside bounds for " + name());
    switch (family_) {
        case ProblemFamily::zdt3: return zdt3(x, k_);
        case ProblemFamily::dtlz7: return dtlz7(x, k_);
        case ProblemFamily::wfg2: return wfg2(x, k_);
    }
    throw std::logic_error("unreachable");
}

std::size_t Problem::nominal_segments() const {
    const auto k = static_cast<std::size_t>(k_);
    switch (family_) {
        case ProblemFamily::zdt3: return 5 * k;
        case ProblemFamily::dtlz7: return (3 * k) / 2 + 1;
        case ProblemFamily::wfg2: return 5 * k + 1;
    }
    return 1;
}

Vector Problem::pareto_decision(double t) const {
    t = std::clamp(t, 0.0, 1.0);
    Vector x(n_, 0.0);
    if (family_ == ProblemFamily::wfg2) {
        // t1 = (y0 + y1) / 2 with y_i = z_i / (2(i+1)); distance variables at 0.35
        x[0] = 2.0 * t;
        x[1] = 4.0 * t;
        for (std::size_t i = 2; i < n_; ++i) x[i] = 0.35 * 2.0 * static_cast<double>(i + 1);
        return bounds_.clip(x);
    }
    x[0] = t;
    return x;
}

std::vector<Vector> Problem::true_pf_sample(std::size_t density) const {
    if (density < 2) throw std::invalid_argument("true_pf_sample: density must be >= 2");
    const std::size_t sweep = density * nominal_segments();
    std::vector<Vector> pts;
    pts.reserve(sweep);
    for (std::size_t i = 0; i < sweep; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(sweep - 1);
        pts.push_back(evaluate(pareto_decision(t)));
    }
    std::vector<Vector> front;
    for (std::size_t i : nondominated_filter(pts)) front.push_back(pts[i]);
    return front;
}

Vector Problem::metric_reference() const {
    const auto front = true_pf_sample(2000);
    Vector nadir(2, -std::numeric_limits<double>::infinity());
    for (const auto& p : front)
        for (std::size_t j = 0; j < 2; ++j) nadir[j] = std::max(nadir[j], p[j]);
    Vector ref(2);
    for (std::size_t j = 0; j < 2; ++j) ref[j] = nadir[j] > 0.0 ? 1.1 * nadir[j] : std::max(nadir[j] + 0.1 * std::abs(nadir[j]), 0.1);
    return ref;
}

Problem make_problem(std::string_view name, std::size_t n, std::optional<int> k) {
    std::string_view base = name;
    std::optional<int> suffix_k;
    if (const auto pos = name.find("-k"); pos != std::string_view::npos) {
        base = name.substr(0, pos);
        int v = 0;
        const auto digits = name.substr(pos + 2);
        const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
        if (ec != std::errc{} || ptr != digits.data() + digits.size() || v < 1)
            throw std::invalid_argument("malformed problem name '" + std::string(name) + "'");
        suffix_k = v;
    }
    if (suffix_k && k && *suffix_k != *k)
        throw std::invalid_argument("problem name '" + std::string(name) + "' conflicts with k=" + std::to_string(*k));
    return Problem(parse_family(base), n, suffix_k.value_or(k.value_or(1)));
}

std::vector<std::string> problem_families() { return {"zdt3", "dtlz7", "wfg2"}; }

std::vector<Segment> detect_segments(std::vector<Vector> front) {
    if (front.empty()) return {};
    std::sort(front.begin(), front.end(), [](const Vector& a, const Vector& b) { return a[0] < b[0]; });
    std::vector<double> gaps;
    for (std::size_t i = 1; i < front.size(); ++i) gaps.push_back(front[i][0] - front[i - 1][0]);
    double threshold = std::numeric_limits<double>::infinity();
    if (!gaps.empty()) {
        std::vector<double> sorted = gaps;
        std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2), sorted.end());
        threshold = 5.0 * sorted[sorted.size() / 2];
    }

    std::vector<Segment> out;
    auto open = [&](const Vector& p) { out.push_back({p[0], p[0], p[1], p[1], 1}); };
    open(front.front());
    for (std::size_t i = 1; i < front.size(); ++i) {
        if (gaps[i - 1] > threshold) {
            open(front[i]);
            continue;
        }
        Segment& s = out.back();
        s.f1_max = front[i][0];
        s.f2_min = std::min(s.f2_min, front[i][1]);
        s.f2_max = std::max(s.f2_max, front[i][1]);
        ++s.count;
    }
    return out;
}

std::size_t covered_segments(const std::vector<Segment>& segments, const std::vector<Vector>& points) {
    std::size_t covered = 0;
    for (const auto& s : segments) {
        const bool hit = std::any_of(points.begin(), points.end(), [&](const Vector& p) {
            return p[0] >= s.f1_min && p[0] <= s.f1_max && p[1] >= s.f2_min && p[1] <= s.f2_max;
        });
        if (hit) ++covered;
    }
    return covered;
}

}  // namespace d2emo
