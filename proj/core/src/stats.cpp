#include "d2emo/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>

namespace d2emo::stats {

namespace {

void require_finite(std::span<const double> v, const char* who) {
    for (double x : v)
        if (!std::isfinite(x)) throw std::invalid_argument(std::string(who) + ": non-finite value");
}

// Average ranks (1-based) of values; also returns sum over tie groups of t^3 - t.
std::vector<double> average_ranks(std::span<const double> values, double& tie_term) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    tie_term = 0.0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
        const double t = static_cast<double>(j - i + 1);
        tie_term += t * t * t - t;
        i = j + 1;
    }
    return ranks;
}

double normal_two_sided(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

}  // namespace

TestResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b, double alpha) {
    if (a.size() != b.size()) throw std::invalid_argument("wilcoxon_signed_rank: samples must be paired");
    if (a.size() < 5) throw std::invalid_argument("wilcoxon_signed_rank: need at least 5 pairs");
    require_finite(a, "wilcoxon_signed_rank");
    require_finite(b, "wilcoxon_signed_rank");

    std::vector<double> diffs;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) diffs.push_back(a[i] - b[i]);

    TestResult r;
    r.n_effective = diffs.size();
    if (diffs.empty()) {
        r.exact = true;
        return r;
    }

    std::vector<double> abs_diffs(diffs.size());
    std::transform(diffs.begin(), diffs.end(), abs_diffs.begin(), [](double d) { return std::abs(d); });
    double tie_term = 0.0;
    const auto ranks = average_ranks(abs_diffs, tie_term);
    double w_plus = 0.0;
    for (std::size_t i = 0; i < diffs.size(); ++i)
        if (diffs[i] > 0) w_plus += ranks[i];
    r.statistic = w_plus;

    const std::size_t n = diffs.size();
    if (n <= 20) {
        // average ranks are multiples of 1/2, so doubled ranks are integers
        std::vector<std::size_t> doubled(n);
        std::size_t total = 0;
        for (std::size_t i = 0; i < n; ++i) {
            doubled[i] = static_cast<std::size_t>(std::llround(2.0 * ranks[i]));
            total += doubled[i];
        }
        std::vector<double> count(total + 1, 0.0);
        count[0] = 1.0;
        for (std::size_t d : doubled)
            for (std::size_t s = total; s >= d; --s) {
                count[s] += count[s - d];
                if (s == d) break;
            }
        const auto observed = static_cast<long long>(std::llround(2.0 * w_plus));
        const long long dev = std::llabs(2 * observed - static_cast<long long>(total));
        double extreme = 0.0;
        for (std::size_t s = 0; s <= total; ++s)
            if (std::llabs(2 * static_cast<long long>(s) - static_cast<long long>(total)) >= dev) extreme += count[s];
        r.p_value = std::min(1.0, extreme / std::ldexp(1.0, static_cast<int>(n)));
        r.exact = true;
    } else {
        const double nn = static_cast<double>(n);
        const double mean = nn * (nn + 1.0) / 4.0;
        const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term / 48.0;
        if (var <= 0.0) {
            r.p_value = 1.0;
        } else {
            const double z = std::max(0.0, std::abs(w_plus - mean) - 0.5) / std::sqrt(var);
            r.p_value = std::min(1.0, normal_two_sided(z));
        }
    }
    r.significant = r.p_value < alpha;
    return r;
}

TestResult wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b, double alpha) {
    if (a.empty() || b.empty()) throw std::invalid_argument("wilcoxon_rank_sum: empty sample");
    require_finite(a, "wilcoxon_rank_sum");
    require_finite(b, "wilcoxon_rank_sum");
    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    double tie_term = 0.0;
    const auto ranks = average_ranks(pooled, tie_term);
    const double n1 = static_cast<double>(a.size());
    const double n2 = static_cast<double>(b.size());
    double r1 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) r1 += ranks[i];
    const double u = r1 - n1 * (n1 + 1.0) / 2.0;

    TestResult r;
    r.statistic = u;
    r.n_effective = a.size() + b.size();
    const double N = n1 + n2;
    const double var = n1 * n2 / 12.0 * ((N + 1.0) - tie_term / (N * (N - 1.0)));
    if (var <= 0.0) {
        r.p_value = 1.0;
    } else {
        const double z = std::max(0.0, std::abs(u - n1 * n2 / 2.0) - 0.5) / std::sqrt(var);
        r.p_value = std::min(1.0, normal_two_sided(z));
    }
    r.significant = r.p_value < alpha;
    return r;
}

double a12(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("a12: empty sample");
    double wins = 0.0;
    for (double x : a)
        for (double y : b) wins += x > y ? 1.0 : (x == y ? 0.5 : 0.0);
    return wins / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

EffectSize classify_a12(double value) {
    const double m = std::max(value, 1.0 - value);
    if (m < 0.56) return EffectSize::equal;
    if (m < 0.64) return EffectSize::small;
    if (m < 0.71) return EffectSize::medium;
    return EffectSize::large;
}

const char* to_string(EffectSize e) noexcept {
    switch (e) {
        case EffectSize::equal: return "equal";
        case EffectSize::small: return "small";
        case EffectSize::medium: return "medium";
        case EffectSize::large: return "large";
    }
    return "?";
}

namespace {

double mean_of(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

// Splits sorted[lo, hi) recursively, appending cluster boundaries.
void sk_partition(const std::vector<const SampleGroup*>& sorted, std::size_t lo, std::size_t hi, double alpha,
                  std::vector<std::size_t>& cluster_of, std::size_t& next_cluster) {
    auto pooled = [&](std::size_t from, std::size_t to) {
        Vector v;
        for (std::size_t i = from; i < to; ++i) v.insert(v.end(), sorted[i]->values.begin(), sorted[i]->values.end());
        return v;
    };
    auto assign = [&] {
        for (std::size_t i = lo; i < hi; ++i) cluster_of[i] = next_cluster;
        ++next_cluster;
    };
    if (hi - lo < 2) {
        assign();
        return;
    }

    const Vector all = pooled(lo, hi);
    const double grand = mean_of(all);
    double best_ss = -1.0;
    std::size_t best_cut = lo + 1;
    for (std::size_t cut = lo + 1; cut < hi; ++cut) {
        const Vector left = pooled(lo, cut);
        const Vector right = pooled(cut, hi);
        const double ml = mean_of(left), mr = mean_of(right);
        const double ss = static_cast<double>(left.size()) * (ml - grand) * (ml - grand) +
                          static_cast<double>(right.size()) * (mr - grand) * (mr - grand);
        if (ss > best_ss) {
            best_ss = ss;
            best_cut = cut;
        }
    }
    const Vector left = pooled(lo, best_cut);
    const Vector right = pooled(best_cut, hi);
    const bool differ = wilcoxon_rank_sum(left, right, alpha).significant &&
                        classify_a12(a12(left, right)) != EffectSize::equal;
    if (!differ) {
        assign();
        return;
    }
    sk_partition(sorted, lo, best_cut, alpha, cluster_of, next_cluster);
    sk_partition(sorted, best_cut, hi, alpha, cluster_of, next_cluster);
}

}  // namespace

std::vector<int> scott_knott(const std::vector<SampleGroup>& groups, double alpha) {
    if (groups.empty()) throw std::invalid_argument("scott_knott: no groups");
    for (const auto& g : groups) {
        if (g.values.empty()) throw std::invalid_argument("scott_knott: empty group '" + g.label + "'");
        require_finite(g.values, "scott_knott");
    }
    std::vector<std::size_t> order(groups.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return mean_of(groups[a].values) > mean_of(groups[b].values); });
    std::vector<const SampleGroup*> sorted;
    for (std::size_t i : order) sorted.push_back(&groups[i]);

    std::vector<std::size_t> cluster_of(groups.size());
    std::size_t next_cluster = 0;
    sk_partition(sorted, 0, sorted.size(), alpha, cluster_of, next_cluster);

    std::vector<int> ranks(groups.size());
    for (std::size_t s = 0; s < order.size(); ++s) ranks[order[s]] = static_cast<int>(cluster_of[s]) + 1;
    return ranks;
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw std::invalid_argument("quantile: empty sample");
    std::sort(values.begin(), values.end());
    const double h = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

Summary summarize(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("summarize: empty sample");
    std::vector<double> v(values.begin(), values.end());
    Summary s;
    s.median = quantile(v, 0.5);
    s.iqr = quantile(v, 0.75) - quantile(v, 0.25);
    std::vector<double> dev(v.size());
    std::transform(v.begin(), v.end(), dev.begin(), [&](double x) { return std::abs(x - s.median); });
    s.mad = quantile(dev, 0.5);
    s.mean = mean_of(v);
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.std = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
    return s;
}

}  // namespace d2emo::stats
