#include "d2emo/mgd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "d2emo/doe.hpp"
#include "d2emo/random.hpp"

namespace d2emo {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

Vector combine(const std::vector<Vector>& gradients, const Vector& weights) {
    Vector v(gradients.front().size(), 0.0);
    for (std::size_t j = 0; j < gradients.size(); ++j)
        for (std::size_t i = 0; i < v.size(); ++i) v[i] += weights[j] * gradients[j][i];
    return v;
}

void check_gradients(const std::vector<Vector>& gradients) {
    if (gradients.size() < 2) throw std::invalid_argument("min_norm_weights: need at least two gradients");
    for (const auto& g : gradients) {
        if (g.size() != gradients.front().size()) throw std::invalid_argument("min_norm_weights: gradient length mismatch");
        for (double v : g)
            if (!std::isfinite(v)) throw std::invalid_argument("min_norm_weights: non-finite gradient");
    }
}

// Away-step Frank-Wolfe on min ||G w||^2 / 2 over the simplex. Plain FW
// zig-zags when the optimum sits on a face; away steps shed weight from
// vertices that should leave the support.
Vector frank_wolfe(const std::vector<Vector>& gradients) {
    const std::size_t m = gradients.size();
    std::vector<double> gram(m * m);
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b) gram[a * m + b] = dot(gradients[a], gradients[b]);
    auto times_gram = [&](const Vector& v, Vector& out) {
        for (std::size_t a = 0; a < m; ++a) {
            out[a] = 0.0;
            for (std::size_t b = 0; b < m; ++b) out[a] += gram[a * m + b] * v[b];
        }
    };

    Vector w(m, 1.0 / static_cast<double>(m));
    Vector Mw(m), d(m), Md(m);
    for (int it = 0; it < 500; ++it) {
        times_gram(w, Mw);
        const double wMw = dot(w, Mw);
        std::size_t t = 0, s = m;
        for (std::size_t j = 0; j < m; ++j) {
            if (Mw[j] < Mw[t]) t = j;
            if (w[j] > 0.0 && (s == m || Mw[j] > Mw[s])) s = j;
        }
        const double fw_gap = wMw - Mw[t];
        if (fw_gap < 1e-10) break;
        double max_step = 1.0;
        if (fw_gap >= Mw[s] - wMw) {
            for (std::size_t j = 0; j < m; ++j) d[j] = (j == t ? 1.0 : 0.0) - w[j];
        } else {
            for (std::size_t j = 0; j < m; ++j) d[j] = w[j] - (j == s ? 1.0 : 0.0);
            max_step = w[s] / (1.0 - w[s]);
        }
        times_gram(d, Md);
        const double curvature = dot(d, Md);
        const double slope = dot(d, Mw);
        const double step = curvature > 0.0 ? std::clamp(-slope / curvature, 0.0, max_step) : max_step;
        for (std::size_t j = 0; j < m; ++j) w[j] = std::max(0.0, w[j] + step * d[j]);
        if (step == max_step && fw_gap < Mw[s] - wMw) w[s] = 0.0;  // drop step: vertex leaves the support
    }
    double sum = 0.0;
    for (double v : w) sum += v;
    for (auto& v : w) v /= sum;
    return w;
}

}  // namespace

void MgdConfig::validate() const {
    if (n_candidates < 2) throw std::invalid_argument("MgdConfig: n_candidates must be >= 2");
    if (iterations < 1) throw std::invalid_argument("MgdConfig: iterations must be >= 1");
    if (!(parallel_cos_threshold > 0.0 && parallel_cos_threshold < 1.0))
        throw std::invalid_argument("MgdConfig: parallel_cos_threshold must lie in (0, 1)");
    if (cap < 1) throw std::invalid_argument("MgdConfig: cap must be >= 1");
}

const char* to_string(DirectionCase c) noexcept {
    switch (c) {
        case DirectionCase::stationary: return "stationary";
        case DirectionCase::near_parallel: return "near_parallel";
        case DirectionCase::aggregated: return "aggregated";
    }
    return "unknown";
}

Vector min_norm_weights(const std::vector<Vector>& gradients) {
    check_gradients(gradients);
    if (gradients.size() > 2) return frank_wolfe(gradients);

    const Vector& g1 = gradients[0];
    const Vector& g2 = gradients[1];
    Vector diff(g1.size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = g2[i] - g1[i];
    const double dd = dot(diff, diff);
    if (std::sqrt(dd) < 1e-12) return {0.5, 0.5};
    const double w1 = std::clamp(dot(diff, g2) / dd, 0.0, 1.0);
    return {w1, 1.0 - w1};
}

DirectionOutcome direction(const std::vector<Vector>& gradients, const Vector& weights, const MgdConfig& config) {
    return direction(gradients, weights, config.parallel_cos_threshold);
}

DirectionOutcome direction(const std::vector<Vector>& gradients, const Vector& weights, double parallel_cos_threshold) {
    if (gradients.size() != weights.size()) throw std::invalid_argument("direction: gradients/weights size mismatch");
    const std::size_t m = gradients.size();
    std::vector<double> norms(m);
    for (std::size_t j = 0; j < m; ++j) norms[j] = norm(gradients[j]);

    DirectionOutcome out;
    out.weights = weights;
    const double max_norm = *std::max_element(norms.begin(), norms.end());
    if (max_norm == 0.0) {
        out.u.assign(gradients.front().size(), 0.0);
        out.case_tag = DirectionCase::stationary;
        return out;
    }

    Vector aggregate = combine(gradients, weights);
    if (norm(aggregate) < 1e-8 * max_norm) {
        const auto j = static_cast<std::size_t>(std::max_element(norms.begin(), norms.end()) - norms.begin());
        out.u = gradients[j];
        out.case_tag = DirectionCase::stationary;
        return out;
    }

    bool all_parallel = true;
    for (std::size_t a = 0; a < m && all_parallel; ++a) {
        for (std::size_t b = a + 1; b < m && all_parallel; ++b) {
            if (norms[a] == 0.0 || norms[b] == 0.0) {
                all_parallel = false;
            } else {
                all_parallel = dot(gradients[a], gradients[b]) / (norms[a] * norms[b]) > parallel_cos_threshold;
            }
        }
    }
    if (all_parallel) {
        const auto j = static_cast<std::size_t>(std::min_element(norms.begin(), norms.end()) - norms.begin());
        out.u = gradients[j];
        out.case_tag = DirectionCase::near_parallel;
        return out;
    }

    out.u = std::move(aggregate);
    out.case_tag = DirectionCase::aggregated;
    return out;
}

Vector project_to_active_bounds(std::span<const double> g, std::span<const double> x, const Bounds& bounds) {
    if (g.size() != x.size() || x.size() != bounds.dimension())
        throw std::invalid_argument("project_to_active_bounds: dimension mismatch");
    Vector out(g.begin(), g.end());
    for (std::size_t i = 0; i < out.size(); ++i) {
        if ((x[i] <= bounds.lower()[i] && out[i] > 0.0) || (x[i] >= bounds.upper()[i] && out[i] < 0.0)) out[i] = 0.0;
    }
    return out;
}

Vector mgd_step(std::span<const double> x, const DirectionOutcome& outcome, double eta, const Bounds& bounds) {
    if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("mgd_step: eta must lie in (0, 1]");
    if (x.size() != outcome.u.size()) throw std::invalid_argument("mgd_step: dimension mismatch");
    Vector next(x.begin(), x.end());
    for (std::size_t i = 0; i < next.size(); ++i) next[i] -= eta * outcome.u[i];
    return bounds.clip(next);
}

std::vector<Vector> CandidateSet::predicted_objectives() const {
    std::vector<Vector> out;
    out.reserve(members.size());
    for (const auto& s : members) out.push_back(*s.predicted);
    return out;
}

SurrogateView evaluate_surrogates(std::span<const GpSurrogate> models, std::span<const double> x) {
    SurrogateView view;
    view.mean.resize(models.size());
    view.gradients.assign(models.size(), Vector(x.size()));
    for (std::size_t j = 0; j < models.size(); ++j) view.mean[j] = models[j].mean_and_gradient(x, view.gradients[j]);
    return view;
}

CandidateSet mgd_search(std::span<const GpSurrogate> models, const Bounds& bounds, const MgdConfig& config) {
    config.validate();
    if (models.size() < 2) throw std::invalid_argument("mgd_search: need at least two surrogate models");
    for (const auto& model : models) {
        if (model.dimension() != bounds.dimension()) throw std::invalid_argument("mgd_search: model/bounds dimension mismatch");
    }

    auto finite = [](const Vector& v) { return std::all_of(v.begin(), v.end(), [](double d) { return std::isfinite(d); }); };

    CandidateSet P;
    auto initial = lhs_sample({config.n_candidates, bounds, derive_seed(config.seed, {0xD0E})});
    for (const auto& s : config.seed_points) {
        if (!bounds.contains(s)) throw std::invalid_argument("mgd_search: seed point outside bounds");
        initial.push_back(s);
    }
    P.members.reserve(initial.size());
    for (auto& x : initial) P.members.push_back(Solution{std::move(x), std::nullopt, std::nullopt});

    std::vector<SurrogateView> views(P.members.size());
    for (std::size_t i = 0; i < P.members.size(); ++i) {
        views[i] = evaluate_surrogates(models, P.members[i].x);
        if (!finite(views[i].mean)) throw MgdError("mgd_search: non-finite surrogate prediction", 0);
        P.members[i].predicted = views[i].mean;
    }

    for (std::size_t iter = 0; iter < config.iterations; ++iter) {
        const std::size_t current = P.members.size();
        for (std::size_t i = 0; i < current; ++i) {
            std::vector<Vector> grads = views[i].gradients;
            for (auto& g : grads) {
                if (!finite(g)) throw MgdError("mgd_search: non-finite surrogate gradient at iteration " + std::to_string(iter), iter);
                if (config.project_bounds) g = project_to_active_bounds(g, P.members[i].x, bounds);
            }
            const Vector w = min_norm_weights(grads);
            DirectionOutcome outcome = direction(grads, w, config);
            const double un = norm(outcome.u);
            if (un == 0.0) continue;
            if (config.normalize_step) {
                for (auto& v : outcome.u) v /= un;
            }
            Rng rng(derive_seed(config.seed, {iter + 1, i}));
            const double eta = rng.uniform_open_closed();
            Vector next = mgd_step(P.members[i].x, outcome, eta, bounds);
            SurrogateView view = evaluate_surrogates(models, next);
            if (!finite(view.mean))
                throw MgdError("mgd_search: non-finite surrogate prediction at iteration " + std::to_string(iter), iter);
            P.members.push_back(Solution{std::move(next), std::nullopt, view.mean});
            views.push_back(std::move(view));
        }

        // predicted-dominance filter, then drop decision-space duplicates
        const auto kept = nondominated_filter(P.predicted_objectives());
        std::vector<std::size_t> unique;
        unique.reserve(kept.size());
        for (std::size_t idx : kept) {
            const bool dup = std::any_of(unique.begin(), unique.end(), [&](std::size_t u) {
                return bounds.near_duplicate(P.members[u].x, P.members[idx].x);
            });
            if (!dup) unique.push_back(idx);
        }
        std::vector<Vector> objs;
        objs.reserve(unique.size());
        for (std::size_t idx : unique) objs.push_back(*P.members[idx].predicted);
        const auto trimmed = crowding_truncate(objs, config.cap);

        CandidateSet next;
        std::vector<SurrogateView> next_views;
        next.members.reserve(trimmed.size());
        next_views.reserve(trimmed.size());
        for (std::size_t t : trimmed) {
            next.members.push_back(std::move(P.members[unique[t]]));
            next_views.push_back(std::move(views[unique[t]]));
        }
        P = std::move(next);
        views = std::move(next_views);
    }
    return P;
}

}  // namespace d2emo
