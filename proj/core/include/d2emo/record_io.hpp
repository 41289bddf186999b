#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "d2emo/runner.hpp"

namespace d2emo {

/// Experiment config JSON. Every field is optional; missing fields keep
/// their defaults:
///
///   { "problem": "zdt3", "n": 3, "k": 1, "init_size": 0, "fe_budget": 250,
///     "xi": 10, "algorithm": "mgd", "seeds": [1, 2],
///     "seed_from_archive": false,
///     "mgd": { "n_candidates": 100, "iterations": 100,
///              "parallel_cos_threshold": 0.95, "cap": 200,
///              "normalize_step": false, "project_bounds": false },
///     "fit": { "starts": 8, "evaluations_per_start": 200,
///              "interpolation_cap": true } }
ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& config);

/// RunRecord JSON (schema "d2emo.run/1"):
///
///   { "schema", "problem", "reconstruction", "algorithm", "seed",
///     "config": {...}, "metric_ref": [r1, r2], "status", "diagnostic",
///     "archive": [ {"x": [...], "f": [...]}, ... ],
///     "trace": [ {"iteration", "evaluations", "archive_hv",
///                 "candidate_count", "batch": [archive indices]}, ... ] }
///
/// Doubles are written in shortest round-trip form. Wall-clock time is not
/// part of the record.
std::string record_to_json(const RunRecord& record);
RunRecord record_from_json(const std::string& text);

/// File name stem "<problem>_n<n>_<algorithm>_s<seed>".
std::string record_stem(const RunRecord& record);

void save_record(const RunRecord& record, const std::filesystem::path& path);
RunRecord load_record(const std::filesystem::path& path);

/// Loads every *.json under dir, sorted by file name.
std::vector<RunRecord> load_records(const std::filesystem::path& dir);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace d2emo
