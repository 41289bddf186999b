#pragma once

#include <cstdint>
#include <vector>

#include "d2emo/core.hpp"

namespace d2emo {

struct LhsPlan {
    std::size_t n_points = 1;
    Bounds bounds;
    std::uint64_t seed = 0;
};

/// Latin hypercube design: every dimension has exactly one sample in each of
/// the n_points equal-width strata. Within-stratum offsets are uniform and each
/// dimension uses an independent random permutation of strata.
std::vector<Vector> lhs_sample(const LhsPlan& plan);

}  // namespace d2emo
