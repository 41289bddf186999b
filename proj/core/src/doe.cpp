#include "d2emo/doe.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "d2emo/random.hpp"

namespace d2emo {

std::vector<Vector> lhs_sample(const LhsPlan& plan) {
    if (plan.n_points == 0) throw std::invalid_argument("lhs_sample: n_points must be >= 1");
    const std::size_t n = plan.bounds.dimension();
    const std::size_t count = plan.n_points;
    Rng rng(plan.seed);

    std::vector<Vector> out(count, Vector(n));
    std::vector<std::size_t> strata(count);
    for (std::size_t d = 0; d < n; ++d) {
        std::iota(strata.begin(), strata.end(), std::size_t{0});
        for (std::size_t i = count; i > 1; --i) std::swap(strata[i - 1], strata[rng.below(i)]);
        const double lo = plan.bounds.lower()[d];
        const double width = plan.bounds.range(d) / static_cast<double>(count);
        for (std::size_t i = 0; i < count; ++i) {
            const double v = lo + (static_cast<double>(strata[i]) + rng.uniform()) * width;
            out[i][d] = std::min(v, plan.bounds.upper()[d]);
        }
    }
    return out;
}

}  // namespace d2emo
