#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace d2emo {

using Vector = std::vector<double>;

/// Decision-space duplicate tolerance, measured on range-normalized coordinates.
inline constexpr double kDuplicateTolerance = 1e-9;

/// Box constraints Ω = [lower, upper]^n.
class Bounds {
public:
    Bounds(Vector lower, Vector upper);

    static Bounds unit(std::size_t n) { return Bounds(Vector(n, 0.0), Vector(n, 1.0)); }

    std::size_t dimension() const noexcept { return lower_.size(); }
    const Vector& lower() const noexcept { return lower_; }
    const Vector& upper() const noexcept { return upper_; }
    double range(std::size_t i) const { return upper_[i] - lower_[i]; }

    /// Length of the box diagonal.
    double diagonal() const;

    bool contains(std::span<const double> x) const;
    Vector clip(std::span<const double> x) const;
    Vector normalize(std::span<const double> x) const;

    /// Euclidean distance between x and y after range normalization.
    double normalized_distance(std::span<const double> x, std::span<const double> y) const;
    bool near_duplicate(std::span<const double> x, std::span<const double> y,
                        double tol = kDuplicateTolerance) const {
        return normalized_distance(x, y) < tol;
    }

    friend bool operator==(const Bounds&, const Bounds&) = default;

private:
    Vector lower_;
    Vector upper_;
};

/// A decision vector with optional true and predicted objective vectors.
struct Solution {
    Vector x;
    std::optional<Vector> objectives;
    std::optional<Vector> predicted;
};

/// Append-only record of expensively evaluated solutions (the training data).
class Archive {
public:
    explicit Archive(Bounds bounds) : bounds_(std::move(bounds)) {}

    const Bounds& bounds() const noexcept { return bounds_; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    const std::vector<Solution>& entries() const noexcept { return entries_; }
    const Solution& operator[](std::size_t i) const { return entries_[i]; }

    /// True if some entry lies within the duplicate tolerance of x.
    bool contains_near(std::span<const double> x) const;

    /// Throws std::invalid_argument if the solution has no objectives, is out of
    /// bounds, has a mismatched objective count, or duplicates an existing entry.
    void append(Solution s);

    std::vector<Vector> decision_vectors() const;
    std::vector<Vector> objective_vectors() const;

private:
    Bounds bounds_;
    std::vector<Solution> entries_;
};

/// Pareto dominance for minimization: a ≤ b componentwise and a ≠ b.
bool dominates(std::span<const double> a, std::span<const double> b);

/// Indices (ascending) of the mutually nondominated members of points.
/// Identical vectors do not dominate each other, so all copies are kept.
std::vector<std::size_t> nondominated_filter(const std::vector<Vector>& points);

/// NSGA-II style crowding distance; boundary points receive +infinity.
std::vector<double> crowding_distances(const std::vector<Vector>& points);

/// Keeps min(k, |points|) indices (ascending): boundary points first, then by
/// decreasing crowding distance, ties broken by lowest index.
std::vector<std::size_t> crowding_truncate(const std::vector<Vector>& points, std::size_t k);

}  // namespace d2emo
