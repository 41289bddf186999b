#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "d2emo/runner.hpp"

namespace d2emo {

class ReportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ReportOptions {
    std::size_t pf_density = 200;  ///< true-front sweep density for pf_*.csv
    double alpha = 0.05;
};

/// Writes, under out_dir:
///   results.csv                     one row per run
///   table.csv / table.txt           per (problem, n, algorithm) summary with
///                                   signed-rank test and A12 against the
///                                   reference algorithm (mgd when present),
///                                   Scott-Knott rank, best-median marking
///   front_<problem>_n<n>_<algo>.csv nondominated archive front of the median run
///   pf_<problem>.csv                true-front sample
/// Output depends only on the records, never on their order. Returns the paths written.
std::vector<std::filesystem::path> emit_report(std::vector<RunRecord> records, const std::filesystem::path& out_dir,
                                               const ReportOptions& options = {});

/// Shortest round-trip decimal form.
std::string format_double(double v);

}  // namespace d2emo
