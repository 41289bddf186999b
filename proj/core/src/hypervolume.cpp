#include "d2emo/hypervolume.hpp"

#include <algorithm>
#include <limits>
#include <string>
#include <numeric>
#include <stdexcept>

#include "d2emo/random.hpp"

namespace d2emo {

namespace {

void require_2d(const std::vector<Vector>& points, std::span<const double> ref, const char* who) {
    if (ref.size() != 2) throw std::invalid_argument(std::string(who) + ": two objectives required");
    for (const auto& p : points)
        if (p.size() != 2) throw std::invalid_argument(std::string(who) + ": two objectives required");
}

bool inside(const Vector& p, std::span<const double> ref) { return p[0] < ref[0] && p[1] < ref[1]; }

// Indices of points strictly inside the reference box, sorted by (f1, f2, index).
std::vector<std::size_t> sorted_effective(const std::vector<Vector>& points, std::span<const double> ref) {
    std::vector<std::size_t> order;
    order.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i)
        if (inside(points[i], ref)) order.push_back(i);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (points[a][0] != points[b][0]) return points[a][0] < points[b][0];
        if (points[a][1] != points[b][1]) return points[a][1] < points[b][1];
        return a < b;
    });
    return order;
}

}  // namespace

double hv2d(const std::vector<Vector>& points, std::span<const double> ref) {
    require_2d(points, ref, "hv2d");
    double hv = 0.0;
    double ceiling = ref[1];
    for (std::size_t idx : sorted_effective(points, ref)) {
        const Vector& p = points[idx];
        if (p[1] < ceiling) {
            hv += (ref[0] - p[0]) * (ceiling - p[1]);
            ceiling = p[1];
        }
    }
    return hv;
}

std::vector<double> ihv(const std::vector<Vector>& points, std::span<const double> ref) {
    require_2d(points, ref, "ihv");
    std::vector<double> contrib(points.size(), 0.0);

    // Staircase of strictly improving points. Each stair point s owns the cell
    // [p1, right) x [p2, top) bounded by its neighbours. A non-stair point lies
    // in at most one cell and, once s is removed, re-covers part of it.
    std::vector<std::size_t> stair;
    std::vector<std::size_t> rest;
    double ceiling = ref[1];
    for (std::size_t idx : sorted_effective(points, ref)) {
        if (points[idx][1] < ceiling) {
            stair.push_back(idx);
            ceiling = points[idx][1];
        } else {
            rest.push_back(idx);
        }
    }
    if (stair.empty()) return contrib;

    auto right_of = [&](std::size_t s) { return s + 1 < stair.size() ? points[stair[s + 1]][0] : ref[0]; };
    auto top_of = [&](std::size_t s) { return s > 0 ? points[stair[s - 1]][1] : ref[1]; };

    std::vector<std::vector<Vector>> occupants(stair.size());
    for (std::size_t idx : rest) {
        const Vector& q = points[idx];
        // last stair point with f1 <= q1
        const auto it = std::upper_bound(stair.begin(), stair.end(), q[0],
                                         [&](double v, std::size_t s) { return v < points[s][0]; });
        if (it == stair.begin()) continue;
        const std::size_t s = static_cast<std::size_t>(it - stair.begin()) - 1;
        if (q[0] < right_of(s) && q[1] < top_of(s)) occupants[s].push_back(q);
    }

    for (std::size_t s = 0; s < stair.size(); ++s) {
        const Vector& p = points[stair[s]];
        const double corner[2] = {right_of(s), top_of(s)};
        double area = (corner[0] - p[0]) * (corner[1] - p[1]);
        if (!occupants[s].empty()) area -= hv2d(occupants[s], corner);
        contrib[stair[s]] = std::max(0.0, area);
    }
    return contrib;
}

double hv_monte_carlo(const std::vector<Vector>& points, std::span<const double> ref, std::size_t samples,
                      std::uint64_t seed) {
    if (points.empty() || samples == 0) return 0.0;
    const std::size_t m = ref.size();
    Vector lo(ref.begin(), ref.end());
    std::vector<const Vector*> eff;
    for (const auto& p : points) {
        if (p.size() != m) throw std::invalid_argument("hv_monte_carlo: objective count mismatch");
        bool in = true;
        for (std::size_t j = 0; j < m; ++j) in = in && p[j] < ref[j];
        if (!in) continue;
        eff.push_back(&p);
        for (std::size_t j = 0; j < m; ++j) lo[j] = std::min(lo[j], p[j]);
    }
    if (eff.empty()) return 0.0;
    double volume = 1.0;
    for (std::size_t j = 0; j < m; ++j) volume *= ref[j] - lo[j];

    Rng rng(seed);
    Vector s(m);
    std::size_t hits = 0;
    for (std::size_t k = 0; k < samples; ++k) {
        for (std::size_t j = 0; j < m; ++j) s[j] = rng.uniform(lo[j], ref[j]);
        for (const Vector* p : eff) {
            bool dom = true;
            for (std::size_t j = 0; j < m && dom; ++j) dom = (*p)[j] <= s[j];
            if (dom) {
                ++hits;
                break;
            }
        }
    }
    return volume * static_cast<double>(hits) / static_cast<double>(samples);
}

Vector dynamic_reference(const std::vector<Vector>& points) {
    if (points.empty()) throw std::invalid_argument("dynamic_reference: no points");
    const std::size_t m = points.front().size();
    Vector hi(m, -std::numeric_limits<double>::infinity());
    Vector lo(m, std::numeric_limits<double>::infinity());
    for (const auto& p : points) {
        for (std::size_t j = 0; j < m; ++j) {
            hi[j] = std::max(hi[j], p[j]);
            lo[j] = std::min(lo[j], p[j]);
        }
    }
    Vector ref(m);
    for (std::size_t j = 0; j < m; ++j) ref[j] = hi[j] + std::max(0.1 * (hi[j] - lo[j]), 1e-6);
    return ref;
}

std::vector<std::size_t> select_batch_indices(const CandidateSet& P, std::size_t xi, const Archive& archive,
                                              std::span<const double> ref) {
    if (xi == 0) throw std::invalid_argument("select_batch: xi must be >= 1");
    if (P.empty()) return {};
    const auto contrib = ihv(P.predicted_objectives(), ref);

    std::vector<std::size_t> order;
    order.reserve(P.size());
    for (std::size_t i = 0; i < P.size(); ++i)
        if (!archive.contains_near(P.members[i].x)) order.push_back(i);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return contrib[a] > contrib[b]; });

    const Bounds& bounds = archive.bounds();
    std::vector<std::size_t> chosen;
    for (std::size_t i : order) {
        if (chosen.size() == xi) break;
        const bool dup = std::any_of(chosen.begin(), chosen.end(), [&](std::size_t c) {
            return bounds.near_duplicate(P.members[c].x, P.members[i].x);
        });
        if (!dup) chosen.push_back(i);
    }
    return chosen;
}

std::vector<Solution> select_batch(const CandidateSet& P, std::size_t xi, const Archive& archive,
                                   std::span<const double> ref) {
    std::vector<Solution> out;
    for (std::size_t i : select_batch_indices(P, xi, archive, ref)) out.push_back(P.members[i]);
    return out;
}

}  // namespace d2emo
