#include "d2emo/record_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace d2emo {

using nlohmann::ordered_json;

namespace {

ordered_json config_json(const ExperimentConfig& c) {
    ordered_json j;
    j["problem"] = c.problem;
    j["n"] = c.n;
    j["k"] = c.disconnect_param;
    j["init_size"] = c.effective_init_size();
    j["fe_budget"] = c.fe_budget;
    j["xi"] = c.xi;
    j["algorithm"] = to_string(c.algorithm);
    j["seeds"] = c.seeds;
    j["seed_from_archive"] = c.seed_from_archive;
    j["mgd"] = {{"n_candidates", c.mgd.n_candidates},
                {"iterations", c.mgd.iterations},
                {"parallel_cos_threshold", c.mgd.parallel_cos_threshold},
                {"cap", c.mgd.cap},
                {"normalize_step", c.mgd.normalize_step},
                {"project_bounds", c.mgd.project_bounds}};
    j["fit"] = {{"starts", c.fit.starts},
                {"evaluations_per_start", c.fit.evaluations_per_start},
                {"interpolation_cap", c.fit.interpolation_cap}};
    return j;
}

ExperimentConfig config_from(const nlohmann::json& j) {
    ExperimentConfig c;
    c.problem = j.value("problem", c.problem);
    c.n = j.value("n", c.n);
    c.disconnect_param = j.value("k", c.disconnect_param);
    c.init_size = j.value("init_size", c.init_size);
    c.fe_budget = j.value("fe_budget", c.fe_budget);
    c.xi = j.value("xi", c.xi);
    if (j.contains("algorithm")) c.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
    if (j.contains("seeds")) c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    c.seed_from_archive = j.value("seed_from_archive", c.seed_from_archive);
    if (j.contains("mgd")) {
        const auto& m = j.at("mgd");
        c.mgd.n_candidates = m.value("n_candidates", c.mgd.n_candidates);
        c.mgd.iterations = m.value("iterations", c.mgd.iterations);
        c.mgd.parallel_cos_threshold = m.value("parallel_cos_threshold", c.mgd.parallel_cos_threshold);
        c.mgd.cap = m.value("cap", c.mgd.cap);
        c.mgd.normalize_step = m.value("normalize_step", c.mgd.normalize_step);
        c.mgd.project_bounds = m.value("project_bounds", c.mgd.project_bounds);
    }
    if (j.contains("fit")) {
        const auto& f = j.at("fit");
        c.fit.starts = f.value("starts", c.fit.starts);
        c.fit.evaluations_per_start = f.value("evaluations_per_start", c.fit.evaluations_per_start);
        c.fit.interpolation_cap = f.value("interpolation_cap", c.fit.interpolation_cap);
    }
    return c;
}

}  // namespace

ExperimentConfig config_from_json(const std::string& text) { return config_from(nlohmann::json::parse(text)); }

std::string config_to_json(const ExperimentConfig& config) { return config_json(config).dump(2); }

std::string record_to_json(const RunRecord& r) {
    ordered_json j;
    j["schema"] = "d2emo.run/1";
    j["problem"] = r.problem_name;
    j["reconstruction"] = r.reconstruction;
    j["algorithm"] = to_string(r.config.algorithm);
    j["seed"] = r.seed;
    j["config"] = config_json(r.config);
    j["metric_ref"] = r.metric_ref;
    j["status"] = to_string(r.status);
    j["diagnostic"] = r.diagnostic;
    auto& archive = j["archive"] = ordered_json::array();
    for (const auto& s : r.archive) archive.push_back({{"x", s.x}, {"f", s.objectives.value_or(Vector{})}});
    auto& trace = j["trace"] = ordered_json::array();
    for (const auto& t : r.trace) {
        trace.push_back({{"iteration", t.iteration},
                         {"evaluations", t.evaluations},
                         {"archive_hv", t.archive_hv},
                         {"candidate_count", t.candidate_count},
                         {"batch", t.batch}});
    }
    return j.dump(1) + "\n";
}

RunRecord record_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    if (j.value("schema", std::string{}) != "d2emo.run/1") throw std::invalid_argument("record_from_json: unknown schema");
    RunRecord r;
    r.config = config_from(j.at("config"));
    r.problem_name = j.at("problem").get<std::string>();
    r.reconstruction = j.at("reconstruction").get<bool>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.metric_ref = j.at("metric_ref").get<Vector>();
    r.status = parse_run_status(j.at("status").get<std::string>());
    r.diagnostic = j.at("diagnostic").get<std::string>();
    for (const auto& s : j.at("archive")) r.archive.push_back(Solution{s.at("x").get<Vector>(), s.at("f").get<Vector>(), std::nullopt});
    for (const auto& t : j.at("trace")) {
        TraceEntry e;
        e.iteration = t.at("iteration").get<std::size_t>();
        e.evaluations = t.at("evaluations").get<std::size_t>();
        e.archive_hv = t.at("archive_hv").get<double>();
        e.candidate_count = t.at("candidate_count").get<std::size_t>();
        e.batch = t.at("batch").get<std::vector<std::size_t>>();
        r.trace.push_back(std::move(e));
    }
    return r;
}

std::string record_stem(const RunRecord& r) {
    return r.problem_name + "_n" + std::to_string(r.config.n) + "_" + to_string(r.config.algorithm) + "_s" +
           std::to_string(r.seed);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << contents;
}

void save_record(const RunRecord& record, const std::filesystem::path& path) { write_file(path, record_to_json(record)); }

RunRecord load_record(const std::filesystem::path& path) { return record_from_json(read_file(path)); }

std::vector<RunRecord> load_records(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::vector<RunRecord> out;
    for (const auto& f : files) out.push_back(load_record(f));
    return out;
}

}  // namespace d2emo
