// d2emo command-line driver: run | bench | report | pf
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "d2emo/problems.hpp"
#include "d2emo/record_io.hpp"
#include "d2emo/report.hpp"
#include "d2emo/runner.hpp"

namespace fs = std::filesystem;
using namespace d2emo;

namespace {

struct CommonFlags {
    std::string config_path;
    std::optional<std::string> problem;
    std::optional<std::size_t> n;
    std::optional<int> k;
    std::optional<std::size_t> budget;
    std::optional<std::size_t> xi;
    std::optional<std::size_t> init_size;
    std::optional<std::string> algo;
    std::string out = "out";
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config_path, "Experiment config JSON file")->check(CLI::ExistingFile);
    cmd->add_option("--problem", f.problem, "Problem name (zdt3, dtlz7, wfg2, optionally with -k<d>)");
    cmd->add_option("--n", f.n, "Decision dimension");
    cmd->add_option("--k", f.k, "Disconnection parameter (1 = standard problem)");
    cmd->add_option("--budget", f.budget, "Expensive evaluation budget");
    cmd->add_option("--xi", f.xi, "Infill batch size");
    cmd->add_option("--init", f.init_size, "Initial design size (default 11n-1)");
    cmd->add_option("--algo", f.algo, "Algorithm")->check(CLI::IsMember({"mgd", "random"}));
    cmd->add_option("--out", f.out, "Output directory");
}

ExperimentConfig resolve(const CommonFlags& f) {
    ExperimentConfig c = f.config_path.empty() ? ExperimentConfig{} : config_from_json(read_file(f.config_path));
    if (f.problem) c.problem = *f.problem;
    if (f.n) c.n = *f.n;
    if (f.k) c.disconnect_param = *f.k;
    if (f.budget) c.fe_budget = *f.budget;
    if (f.xi) c.xi = *f.xi;
    if (f.init_size) c.init_size = *f.init_size;
    if (f.algo) c.algorithm = parse_algorithm(*f.algo);
    // a "-k<d>" suffix in the name wins over the default k
    const Problem p = make_problem(c.problem, c.n, f.k ? f.k : std::nullopt);
    c.problem = p.name().substr(0, p.name().find("-k"));
    c.disconnect_param = f.k ? *f.k : (p.disconnect_param() != 1 ? p.disconnect_param() : c.disconnect_param);
    return c;
}

void print_summary(const RunRecord& r) {
    std::cout << record_stem(r) << ": status=" << to_string(r.status) << " evaluations=" << r.archive.size()
              << " hv=" << format_double(r.final_hv()) << " time=" << r.wall_clock_seconds << "s";
    if (r.reconstruction) std::cout << " (reconstructed variant)";
    if (!r.diagnostic.empty()) std::cout << " [" << r.diagnostic << "]";
    std::cout << "\n";
}

std::vector<std::uint64_t> seed_range(std::uint64_t first, std::size_t count) {
    std::vector<std::uint64_t> s(count);
    for (std::size_t i = 0; i < count; ++i) s[i] = first + i;
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Surrogate-assisted multi-objective optimization with multiple-gradient descent"};
    app.require_subcommand(1);

    CommonFlags run_flags;
    std::optional<std::uint64_t> run_seed;
    auto* run_cmd = app.add_subcommand("run", "Run one config with one seed");
    add_common(run_cmd, run_flags);
    run_cmd->add_option("--seed", run_seed, "Run seed");

    CommonFlags bench_flags;
    std::vector<std::string> bench_problems;
    std::vector<std::size_t> bench_ns;
    std::vector<std::string> bench_algos;
    std::size_t repeats = 11;
    std::uint64_t first_seed = 1;
    std::size_t jobs = std::max(1u, std::thread::hardware_concurrency());
    auto* bench_cmd = app.add_subcommand("bench", "Run a problem x n x algorithm matrix over seeds, then report");
    add_common(bench_cmd, bench_flags);
    bench_cmd->add_option("--problems", bench_problems, "Problem names")->delimiter(',');
    bench_cmd->add_option("--ns", bench_ns, "Decision dimensions")->delimiter(',');
    bench_cmd->add_option("--algos", bench_algos, "Algorithms")->delimiter(',')->check(CLI::IsMember({"mgd", "random"}));
    bench_cmd->add_option("--repeats", repeats, "Seeds per cell (ignored when the config lists seeds)");
    bench_cmd->add_option("--seed", first_seed, "First seed");
    bench_cmd->add_option("--jobs", jobs, "Worker threads");

    std::string report_in;
    std::string report_out;
    std::size_t pf_density = 200;
    auto* report_cmd = app.add_subcommand("report", "Build tables and plot data from persisted run records");
    report_cmd->add_option("--in", report_in, "Directory holding runs/*.json (or the runs directory itself)")->required();
    report_cmd->add_option("--out", report_out, "Output directory (default: --in)");
    report_cmd->add_option("--pf-density", pf_density, "True-front sweep density");

    std::string pf_problem = "zdt3";
    std::size_t pf_n = 3;
    std::optional<int> pf_k;
    std::size_t density = 200;
    std::string pf_out = "out";
    auto* pf_cmd = app.add_subcommand("pf", "Write a true Pareto-front sample");
    pf_cmd->add_option("--problem", pf_problem, "Problem name");
    pf_cmd->add_option("--n", pf_n, "Decision dimension");
    pf_cmd->add_option("--k", pf_k, "Disconnection parameter");
    pf_cmd->add_option("--density", density, "Sweep points per nominal segment");
    pf_cmd->add_option("--out", pf_out, "Output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) {
            ExperimentConfig c = resolve(run_flags);
            const std::uint64_t seed = run_seed.value_or(c.seeds.empty() ? 1 : c.seeds.front());
            const RunRecord r = run_experiment(c, seed);
            const fs::path path = fs::path(run_flags.out) / "runs" / (record_stem(r) + ".json");
            save_record(r, path);
            print_summary(r);
            std::cout << "wrote " << path.string() << "\n";
            return r.status == RunStatus::completed ? 0 : 2;
        }
        if (*bench_cmd) {
            const ExperimentConfig base = resolve(bench_flags);
            if (bench_problems.empty()) bench_problems = {base.problem + (base.disconnect_param != 1 ? "-k" + std::to_string(base.disconnect_param) : "")};
            if (bench_ns.empty()) bench_ns = {base.n};
            if (bench_algos.empty()) bench_algos = {"mgd", "random"};
            const auto seeds = bench_flags.config_path.empty() ? seed_range(first_seed, repeats) : base.seeds;

            std::vector<RunRequest> requests;
            for (const auto& name : bench_problems) {
                for (std::size_t n : bench_ns) {
                    const Problem p = make_problem(name, n);
                    for (const auto& a : bench_algos) {
                        ExperimentConfig c = base;
                        c.problem = p.name().substr(0, p.name().find("-k"));
                        c.disconnect_param = p.disconnect_param();
                        c.n = n;
                        c.init_size = bench_flags.init_size.value_or(0);
                        c.algorithm = parse_algorithm(a);
                        c.validate();
                        for (auto s : seeds) requests.push_back({c, s});
                    }
                }
            }
            std::cout << "running " << requests.size() << " runs on " << jobs << " worker(s)\n";
            const auto records = run_all(requests, jobs);
            bool ok = true;
            for (const auto& r : records) {
                save_record(r, fs::path(bench_flags.out) / "runs" / (record_stem(r) + ".json"));
                print_summary(r);
                ok = ok && r.status == RunStatus::completed;
            }
            for (const auto& p : emit_report(records, bench_flags.out, {pf_density, 0.05})) std::cout << "wrote " << p.string() << "\n";
            return ok ? 0 : 2;
        }
        if (*report_cmd) {
            fs::path in = report_in;
            if (fs::is_directory(in / "runs")) in /= "runs";
            const fs::path out = report_out.empty() ? fs::path(report_in) : fs::path(report_out);
            const auto records = load_records(in);
            if (records.empty()) throw std::runtime_error("no run records found in " + in.string());
            for (const auto& p : emit_report(records, out, {pf_density, 0.05})) std::cout << "wrote " << p.string() << "\n";
            return 0;
        }
        if (*pf_cmd) {
            const Problem p = make_problem(pf_problem, pf_n, pf_k);
            const auto front = p.true_pf_sample(density);
            std::string csv = "f1,f2\n";
            for (const auto& f : front) csv += format_double(f[0]) + "," + format_double(f[1]) + "\n";
            const fs::path path = fs::path(pf_out) / ("pf_" + p.name() + ".csv");
            write_file(path, csv);
            std::cout << "wrote " << path.string() << " (" << front.size() << " points, "
                      << detect_segments(front).size() << " segments";
            if (p.is_reconstruction()) std::cout << ", reconstructed variant";
            std::cout << ")\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
