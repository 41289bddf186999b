#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "d2emo/core.hpp"

namespace d2emo {

enum class ProblemFamily { zdt3, dtlz7, wfg2 };

/// Two-objective benchmark with a disconnected Pareto front.
///
/// disconnect_param k scales the frequency that creates the disconnection:
///   zdt3   sin(10 pi f1)      -> sin(10 k pi f1)
///   dtlz7  sin(3 pi f1)       -> sin(3 k pi f1)
///   wfg2   disc shape A = 5   -> A = 5k
/// k = 1 is the standard problem. k > 1 variants are reconstructions that
/// reproduce "more segments" and are labelled as such in output metadata.
class Problem {
public:
    Problem(ProblemFamily family, std::size_t n, int disconnect_param = 1);

    /// Registry name, e.g. "zdt3" or "dtlz7-k3".
    std::string name() const;
    ProblemFamily family() const noexcept { return family_; }
    std::size_t n() const noexcept { return n_; }
    std::size_t m() const noexcept { return 2; }
    int disconnect_param() const noexcept { return k_; }
    bool is_reconstruction() const noexcept { return k_ != 1; }
    const Bounds& bounds() const noexcept { return bounds_; }

    /// Throws std::invalid_argument if x is outside the bounds.
    Vector evaluate(std::span<const double> x) const;

    /// Nondominated points of a dense sweep of the analytic front, sorted by
    /// f1. The sweep uses density * nominal_segments() parameter values.
    std::vector<Vector> true_pf_sample(std::size_t density) const;

    /// Approximate number of front segments; sizes the true-front sweep.
    std::size_t nominal_segments() const;

    /// Metric reference point: true-front nadir scaled by 1.1 (for a
    /// non-positive nadir component, nadir + 0.1 |nadir|, floored at +0.1).
    Vector metric_reference() const;

    /// Decision vector with optimal distance variables and position t in [0, 1].
    /// Its image lies on the analytic curve whose nondominated part is the front.
    Vector pareto_decision(double t) const;

private:
    ProblemFamily family_;
    std::size_t n_;
    int k_;
    Bounds bounds_;
};

/// Parses "zdt3", "dtlz7-k2", "wfg2-k3", ... . An explicit k must agree with a
/// "-k<d>" suffix when both are given.
Problem make_problem(std::string_view name, std::size_t n, std::optional<int> k = std::nullopt);

std::vector<std::string> problem_families();

struct Segment {
    double f1_min;
    double f1_max;
    double f2_min;
    double f2_max;
    std::size_t count;
};

/// Splits a two-objective front into segments: a gap in sorted f1 larger than
/// 5x the median gap starts a new segment.
std::vector<Segment> detect_segments(std::vector<Vector> front);

/// Number of segments whose bounding box contains at least one of points.
std::size_t covered_segments(const std::vector<Segment>& segments, const std::vector<Vector>& points);

}  // namespace d2emo
