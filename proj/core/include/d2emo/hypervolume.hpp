#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "d2emo/core.hpp"
#include "d2emo/mgd.hpp"

namespace d2emo {

/// Exact two-objective hypervolume (minimization) by sort-and-sweep. Points not
/// strictly better than ref in both objectives contribute nothing.
double hv2d(const std::vector<Vector>& points, std::span<const double> ref);

/// Individual contributions HV(P) - HV(P \ {p}) for two objectives.
/// Dominated, duplicated, and out-of-reference points receive zero.
std::vector<double> ihv(const std::vector<Vector>& points, std::span<const double> ref);

/// Monte-Carlo hypervolume estimate for any objective count, sampling the box
/// spanned by the componentwise minimum of the points and ref. Diagnostics only.
double hv_monte_carlo(const std::vector<Vector>& points, std::span<const double> ref,
                      std::size_t samples, std::uint64_t seed);

/// Infill reference point: per-objective max plus 10% of the span (at least 1e-6).
Vector dynamic_reference(const std::vector<Vector>& points);

/// Indices into P of the batch: candidates near-duplicating an archive entry
/// or an already-selected candidate are skipped; the rest are taken by
/// descending IHV with ties broken by lowest index.
std::vector<std::size_t> select_batch_indices(const CandidateSet& P, std::size_t xi, const Archive& archive,
                                              std::span<const double> ref);

std::vector<Solution> select_batch(const CandidateSet& P, std::size_t xi, const Archive& archive,
                                   std::span<const double> ref);

}  // namespace d2emo
