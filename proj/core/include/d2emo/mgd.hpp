#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "d2emo/core.hpp"
#include "d2emo/surrogate.hpp"

namespace d2emo {

struct MgdConfig {
    std::size_t n_candidates = 100;       ///< initial LHS population size
    std::size_t iterations = 100;         ///< descend/filter rounds
    double parallel_cos_threshold = 0.95;  ///< cosine above which gradients count as near-parallel
    std::size_t cap = 200;                ///< |P| limit enforced by crowding truncation
    std::uint64_t seed = 0;
    /// Scale u to unit length before stepping. Off by default: u is used raw
    /// and bounds clipping absorbs overshoot.
    bool normalize_step = false;
    /// Zero gradient components that point out of the box at an active bound
    /// before the direction solve, so points on a bound can test stationary.
    /// Off by default: the plain rule lets clipping absorb those components.
    bool project_bounds = false;
    /// Extra points added to the initial population (e.g. nondominated archive members).
    std::vector<Vector> seed_points;

    void validate() const;
};

enum class DirectionCase { stationary, near_parallel, aggregated };

const char* to_string(DirectionCase c) noexcept;

struct DirectionOutcome {
    Vector u;
    DirectionCase case_tag = DirectionCase::aggregated;
    Vector weights;
};

/// Simplex weights minimizing ||sum_j w_j g_j||. Closed form for two
/// gradients; Frank-Wolfe with exact line search otherwise.
Vector min_norm_weights(const std::vector<Vector>& gradients);

/// Selects the update direction:
///   stationary     ||sum w g|| < 1e-8 max ||g_j||  -> largest-norm gradient
///   near_parallel  every pairwise cosine > threshold -> smallest-norm gradient
///   aggregated     otherwise                         -> sum w g
/// Ties in argmax/argmin resolve to the lowest index.
DirectionOutcome direction(const std::vector<Vector>& gradients, const Vector& weights, const MgdConfig& config);
DirectionOutcome direction(const std::vector<Vector>& gradients, const Vector& weights,
                           double parallel_cos_threshold = 0.95);

/// x' = clip(x - eta * u). eta must lie in (0, 1].
/// g with g_i set to 0 where x_i sits on its lower bound and g_i > 0, or on
/// its upper bound and g_i < 0: the components a descent step x - eta*g
/// could only push outside the box.
Vector project_to_active_bounds(std::span<const double> g, std::span<const double> x, const Bounds& bounds);

Vector mgd_step(std::span<const double> x, const DirectionOutcome& outcome, double eta, const Bounds& bounds);

/// Surrogate-screened candidate set with predicted objectives.
struct CandidateSet {
    std::vector<Solution> members;

    std::size_t size() const noexcept { return members.size(); }
    bool empty() const noexcept { return members.empty(); }
    std::vector<Vector> predicted_objectives() const;
};

class MgdError : public std::runtime_error {
public:
    MgdError(const std::string& what, std::size_t iteration)
        : std::runtime_error(what), iteration_(iteration) {}
    std::size_t iteration() const noexcept { return iteration_; }

private:
    std::size_t iteration_;
};

/// Predicted objective vector and per-objective mean gradients at x.
struct SurrogateView {
    Vector mean;
    std::vector<Vector> gradients;
};
SurrogateView evaluate_surrogates(std::span<const GpSurrogate> models, std::span<const double> x);

/// Multiple-gradient descent on the surrogate means, iterated with
/// predicted-dominance filtering and crowding truncation.
CandidateSet mgd_search(std::span<const GpSurrogate> models, const Bounds& bounds, const MgdConfig& config);

}  // namespace d2emo
