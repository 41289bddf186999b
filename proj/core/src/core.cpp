#include "d2emo/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace d2emo {

Bounds::Bounds(Vector lower, Vector upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
    if (lower_.empty()) throw std::invalid_argument("Bounds: dimension must be at least 1");
    if (lower_.size() != upper_.size()) throw std::invalid_argument("Bounds: lower/upper length mismatch");
    for (std::size_t i = 0; i < lower_.size(); ++i) {
        if (!(lower_[i] < upper_[i]))
            throw std::invalid_argument("Bounds: lower[" + std::to_string(i) + "] must be < upper");
    }
}

double Bounds::diagonal() const {
    double s = 0.0;
    for (std::size_t i = 0; i < dimension(); ++i) s += range(i) * range(i);
    return std::sqrt(s);
}

bool Bounds::contains(std::span<const double> x) const {
    if (x.size() != dimension()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] >= lower_[i] && x[i] <= upper_[i])) return false;
    }
    return true;
}

Vector Bounds::clip(std::span<const double> x) const {
    Vector out(x.begin(), x.end());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::clamp(out[i], lower_[i], upper_[i]);
    return out;
}

Vector Bounds::normalize(std::span<const double> x) const {
    Vector out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - lower_[i]) / range(i);
    return out;
}

double Bounds::normalized_distance(std::span<const double> x, std::span<const double> y) const {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = (x[i] - y[i]) / range(i);
        s += d * d;
    }
    return std::sqrt(s);
}

bool Archive::contains_near(std::span<const double> x) const {
    return std::any_of(entries_.begin(), entries_.end(),
                       [&](const Solution& s) { return bounds_.near_duplicate(s.x, x); });
}

void Archive::append(Solution s) {
    if (!s.objectives) throw std::invalid_argument("Archive: entry has no true objectives");
    if (!bounds_.contains(s.x)) throw std::invalid_argument("Archive: entry outside bounds");
    if (!entries_.empty() && entries_.front().objectives->size() != s.objectives->size())
        throw std::invalid_argument("Archive: objective count mismatch");
    if (contains_near(s.x)) throw std::invalid_argument("Archive: duplicate decision vector");
    entries_.push_back(std::move(s));
}

std::vector<Vector> Archive::decision_vectors() const {
    std::vector<Vector> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.x);
    return out;
}

std::vector<Vector> Archive::objective_vectors() const {
    std::vector<Vector> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(*e.objectives);
    return out;
}

bool dominates(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("dominates: length mismatch");
    bool strictly = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] > b[i]) return false;
        if (a[i] < b[i]) strictly = true;
    }
    return strictly;
}

namespace {

void check_uniform(const std::vector<Vector>& points, const char* who) {
    for (const auto& p : points) {
        if (p.size() != points.front().size())
            throw std::invalid_argument(std::string(who) + ": non-uniform objective length");
    }
}

std::vector<std::size_t> filter_2d(const std::vector<Vector>& points) {
    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (points[a][0] != points[b][0]) return points[a][0] < points[b][0];
        if (points[a][1] != points[b][1]) return points[a][1] < points[b][1];
        return a < b;
    });
    std::vector<std::size_t> kept;
    double best_f2 = std::numeric_limits<double>::infinity();
    const Vector* last = nullptr;
    for (std::size_t idx : order) {
        const Vector& p = points[idx];
        if (p[1] < best_f2 || (last && p == *last)) {
            kept.push_back(idx);
            best_f2 = p[1];
            last = &p;
        }
    }
    std::sort(kept.begin(), kept.end());
    return kept;
}

}  // namespace

std::vector<std::size_t> nondominated_filter(const std::vector<Vector>& points) {
    if (points.empty()) return {};
    check_uniform(points, "nondominated_filter");
    if (points.front().size() == 2) return filter_2d(points);

    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < points.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < points.size() && !dominated; ++j) {
            dominated = j != i && dominates(points[j], points[i]);
        }
        if (!dominated) kept.push_back(i);
    }
    return kept;
}

std::vector<double> crowding_distances(const std::vector<Vector>& points) {
    const std::size_t n = points.size();
    std::vector<double> cd(n, 0.0);
    if (n == 0) return cd;
    check_uniform(points, "crowding_distances");
    const double inf = std::numeric_limits<double>::infinity();
    if (n <= 2) return std::vector<double>(n, inf);

    std::vector<std::size_t> order(n);
    for (std::size_t obj = 0; obj < points.front().size(); ++obj) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return points[a][obj] < points[b][obj]; });
        const double lo = points[order.front()][obj];
        const double hi = points[order.back()][obj];
        cd[order.front()] = inf;
        cd[order.back()] = inf;
        if (!(hi > lo)) continue;
        for (std::size_t r = 1; r + 1 < n; ++r) {
            cd[order[r]] += (points[order[r + 1]][obj] - points[order[r - 1]][obj]) / (hi - lo);
        }
    }
    return cd;
}

std::vector<std::size_t> crowding_truncate(const std::vector<Vector>& points, std::size_t k) {
    const std::size_t n = points.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    if (k >= n) return idx;
    if (k == 0) return {};

    const auto cd = crowding_distances(points);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return cd[a] > cd[b]; });
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    return idx;
}

}  // namespace d2emo
