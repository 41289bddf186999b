#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "d2emo/core.hpp"
#include "d2emo/mgd.hpp"
#include "d2emo/problems.hpp"
#include "d2emo/surrogate.hpp"

namespace d2emo {

enum class Algorithm { mgd, random };

const char* to_string(Algorithm a) noexcept;
Algorithm parse_algorithm(std::string_view s);

struct ExperimentConfig {
    std::string problem = "zdt3";
    std::size_t n = 3;
    int disconnect_param = 1;
    std::size_t init_size = 0;  ///< 0 selects the default 11n - 1
    std::size_t fe_budget = 250;
    std::size_t xi = 10;
    MgdConfig mgd;
    FitOptions fit;
    /// Add the archive's nondominated decision vectors to each MGD start population.
    bool seed_from_archive = false;
    std::vector<std::uint64_t> seeds{1};
    Algorithm algorithm = Algorithm::mgd;

    std::size_t effective_init_size() const noexcept { return init_size == 0 ? 11 * n - 1 : init_size; }
    void validate() const;
    Problem make_problem() const;
};

struct TraceEntry {
    std::size_t iteration = 0;
    std::size_t evaluations = 0;
    double archive_hv = 0.0;
    std::size_t candidate_count = 0;
    std::vector<std::size_t> batch;  ///< archive indices appended this iteration
};

enum class RunStatus { completed, no_eligible_candidates, fit_failed, search_failed };

const char* to_string(RunStatus s) noexcept;
RunStatus parse_run_status(std::string_view s);

struct RunRecord {
    ExperimentConfig config;  ///< snapshot; config.seeds holds just this run's seed
    std::uint64_t seed = 0;
    std::string problem_name;
    bool reconstruction = false;
    Vector metric_ref;
    std::vector<Solution> archive;
    std::vector<TraceEntry> trace;
    RunStatus status = RunStatus::completed;
    std::string diagnostic;
    /// Not serialized with the record, so records stay byte-reproducible.
    double wall_clock_seconds = 0.0;

    double final_hv() const { return trace.empty() ? 0.0 : trace.back().archive_hv; }
    std::vector<Vector> objective_vectors() const;
};

/// Surrogate-assisted loop: LHS initial design, then until the budget is spent
/// fit one GP per objective, run MGD search, evaluate the top-IHV batch.
RunRecord run(const ExperimentConfig& config, std::uint64_t seed);

/// Same loop shape with LHS batches in place of surrogate-guided ones.
RunRecord run_baseline_random(const ExperimentConfig& config, std::uint64_t seed);

/// Dispatches on config.algorithm.
RunRecord run_experiment(const ExperimentConfig& config, std::uint64_t seed);

/// Runs every (config, seed) pair using up to `jobs` worker threads; output
/// order matches the input order.
struct RunRequest {
    ExperimentConfig config;
    std::uint64_t seed;
};
std::vector<RunRecord> run_all(const std::vector<RunRequest>& requests, std::size_t jobs);

}  // namespace d2emo
