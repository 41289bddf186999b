#pragma once

#include <span>
#include <string>
#include <vector>

#include "d2emo/core.hpp"

namespace d2emo::stats {

struct TestResult {
    double p_value = 1.0;
    bool significant = false;
    double statistic = 0.0;   ///< W+ for signed-rank, U (of a) for rank-sum
    std::size_t n_effective = 0;
    bool exact = false;
};

/// Two-sided Wilcoxon signed-rank test on paired samples. Zero differences are
/// dropped before ranking; ties share average ranks. Exact permutation
/// distribution up to 20 nonzero pairs, tie-corrected normal approximation
/// with continuity correction above. Requires equal lengths >= 5.
TestResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b, double alpha = 0.05);

/// Two-sided Wilcoxon rank-sum (Mann-Whitney) test with tie-corrected normal
/// approximation and continuity correction. For unpaired samples of any size.
TestResult wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b, double alpha = 0.05);

/// Vargha-Delaney A12: P(a > b) + 0.5 P(a = b).
double a12(std::span<const double> a, std::span<const double> b);

enum class EffectSize { equal, small, medium, large };

/// Magnitude class of max(A12, 1 - A12): < 0.56 equal, < 0.64 small,
/// < 0.71 medium, otherwise large.
EffectSize classify_a12(double value);
const char* to_string(EffectSize e) noexcept;

struct SampleGroup {
    std::string label;
    Vector values;
};

/// Scott-Knott clustering for a larger-is-better metric. Returns one rank per
/// input group (1 = best cluster).
std::vector<int> scott_knott(const std::vector<SampleGroup>& groups, double alpha = 0.05);

struct Summary {
    double median = 0.0;
    double iqr = 0.0;
    double mad = 0.0;
    double mean = 0.0;
    double std = 0.0;
};

/// Median (linear interpolation), IQR (type-7 quartiles), median absolute
/// deviation, mean and sample standard deviation.
Summary summarize(std::span<const double> values);

double quantile(std::vector<double> values, double q);

}  // namespace d2emo::stats
