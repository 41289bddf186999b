#include "d2emo/report.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "d2emo/problems.hpp"
#include "d2emo/record_io.hpp"
#include "d2emo/stats.hpp"

namespace d2emo {

namespace {

struct CellKey {
    std::string problem;
    std::size_t n;
    auto operator<=>(const CellKey&) const = default;
};

std::string fixed(const char* fmt, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

std::string pad(std::string s, std::size_t width) {
    if (s.size() < width) s.append(width - s.size(), ' ');
    return s;
}

std::vector<Vector> front_of(const RunRecord& r) {
    const auto objs = r.objective_vectors();
    std::vector<Vector> front;
    for (std::size_t i : nondominated_filter(objs)) front.push_back(objs[i]);
    std::sort(front.begin(), front.end());
    front.erase(std::unique(front.begin(), front.end()), front.end());
    return front;
}

std::string points_csv(const std::vector<Vector>& pts) {
    std::string s = "f1,f2\n";
    for (const auto& p : pts) s += format_double(p[0]) + "," + format_double(p[1]) + "\n";
    return s;
}

std::string reference_algorithm(const std::set<std::string>& algos) {
    return algos.count("mgd") ? "mgd" : *algos.begin();
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

std::vector<std::filesystem::path> emit_report(std::vector<RunRecord> records, const std::filesystem::path& out_dir,
                                               const ReportOptions& options) {
    if (records.empty()) throw ReportError("emit_report: no records");
    const std::size_t m = records.front().metric_ref.size();
    for (const auto& r : records) {
        if (r.metric_ref.size() != m) throw ReportError("emit_report: inconsistent objective counts across records");
        for (const auto& s : r.archive)
            if (!s.objectives || s.objectives->size() != m)
                throw ReportError("emit_report: inconsistent objective counts in record " + record_stem(r));
    }
    std::sort(records.begin(), records.end(), [](const RunRecord& a, const RunRecord& b) {
        return std::tuple(a.problem_name, a.config.n, std::string(to_string(a.config.algorithm)), a.seed) <
               std::tuple(b.problem_name, b.config.n, std::string(to_string(b.config.algorithm)), b.seed);
    });

    std::vector<std::filesystem::path> written;
    auto emit = [&](const std::string& name, const std::string& contents) {
        const auto path = out_dir / name;
        write_file(path, contents);
        written.push_back(path);
    };

    {
        std::string csv = "problem,n,k,reconstruction,algorithm,seed,evaluations,final_hv,status\n";
        for (const auto& r : records) {
            csv += r.problem_name + "," + std::to_string(r.config.n) + "," + std::to_string(r.config.disconnect_param) + "," +
                   (r.reconstruction ? "true" : "false") + "," + to_string(r.config.algorithm) + "," +
                   std::to_string(r.seed) + "," + std::to_string(r.archive.size()) + "," + format_double(r.final_hv()) +
                   "," + to_string(r.status) + "\n";
        }
        emit("results.csv", csv);
    }

    // cell -> algorithm -> records (seed order)
    std::map<CellKey, std::map<std::string, std::vector<const RunRecord*>>> cells;
    std::set<std::string> all_algos;
    for (const auto& r : records) {
        cells[{r.problem_name, r.config.n}][to_string(r.config.algorithm)].push_back(&r);
        all_algos.insert(to_string(r.config.algorithm));
    }

    std::string table_csv =
        "problem,n,algorithm,runs,median,iqr,mad,mean,std,best,reference,p_value,significant,a12,effect,sk_rank\n";
    std::ostringstream txt;
    txt << "HV comparison: median(IQR); * best median; + significant vs reference (Wilcoxon signed-rank, alpha="
        << format_double(options.alpha) << ")\n";
    std::vector<std::string> header_algos(all_algos.begin(), all_algos.end());
    const std::string ref_global = reference_algorithm(all_algos);
    std::stable_partition(header_algos.begin(), header_algos.end(), [&](const std::string& a) { return a == ref_global; });
    {
        std::string header = pad("problem", 12) + pad("n", 4);
        for (const auto& a : header_algos) header += " " + pad(a, 22);
        while (header.back() == ' ') header.pop_back();
        txt << header << "\n";
    }

    for (const auto& [key, by_algo] : cells) {
        std::set<std::string> algos;
        for (const auto& [a, _] : by_algo) algos.insert(a);
        const std::string ref_algo = reference_algorithm(algos);

        std::map<std::string, Vector> values;
        std::map<std::string, stats::Summary> summaries;
        std::vector<stats::SampleGroup> groups;
        for (const auto& [a, runs] : by_algo) {
            Vector v;
            for (const auto* r : runs) v.push_back(r->final_hv());
            values[a] = v;
            summaries[a] = stats::summarize(v);
            groups.push_back({a, v});
        }
        const auto ranks = stats::scott_knott(groups, options.alpha);
        std::string best_algo;
        for (const auto& [a, s] : summaries)
            if (best_algo.empty() || s.median > summaries[best_algo].median) best_algo = a;

        std::map<std::string, std::string> cell_text;
        std::size_t gi = 0;
        for (const auto& [a, runs] : by_algo) {
            const auto& s = summaries[a];
            std::string p_str = "", sig_str = "", a12_str = "", eff_str = "";
            bool significant = false;
            if (a != ref_algo) {
                // pair by seed
                std::map<std::uint64_t, double> ref_by_seed;
                for (const auto* r : by_algo.at(ref_algo)) ref_by_seed[r->seed] = r->final_hv();
                Vector x, y;
                for (const auto* r : runs) {
                    if (auto it = ref_by_seed.find(r->seed); it != ref_by_seed.end()) {
                        x.push_back(it->second);
                        y.push_back(r->final_hv());
                    }
                }
                if (x.size() >= 5) {
                    const auto w = stats::wilcoxon_signed_rank(x, y, options.alpha);
                    significant = w.significant;
                    p_str = format_double(w.p_value);
                    sig_str = significant ? "true" : "false";
                }
                const double e = stats::a12(values[ref_algo], values[a]);
                a12_str = format_double(e);
                eff_str = stats::to_string(stats::classify_a12(e));
            }
            table_csv += key.problem + "," + std::to_string(key.n) + "," + a + "," + std::to_string(runs.size()) + "," +
                         format_double(s.median) + "," + format_double(s.iqr) + "," + format_double(s.mad) + "," +
                         format_double(s.mean) + "," + format_double(s.std) + "," + (a == best_algo ? "true" : "false") +
                         "," + ref_algo + "," + p_str + "," + sig_str + "," + a12_str + "," + eff_str + "," +
                         std::to_string(ranks[gi]) + "\n";
            cell_text[a] = (a == best_algo ? "*" : "") + fixed("%.4f", s.median) + "(" + fixed("%.2E", s.iqr) + ")" +
                           (significant ? "+" : "");
            ++gi;
        }
        std::string row = pad(key.problem, 11) + " " + pad(std::to_string(key.n), 4);
        for (const auto& a : header_algos) row += " " + pad(cell_text.count(a) ? cell_text[a] : "-", 22);
        while (!row.empty() && row.back() == ' ') row.pop_back();
        txt << row << "\n";

        for (const auto& [a, runs] : by_algo) {
            std::vector<const RunRecord*> sorted = runs;
            std::stable_sort(sorted.begin(), sorted.end(),
                             [](const RunRecord* x, const RunRecord* y) { return x->final_hv() < y->final_hv(); });
            const RunRecord* median_run = sorted[(sorted.size() - 1) / 2];
            emit("front_" + key.problem + "_n" + std::to_string(key.n) + "_" + a + ".csv", points_csv(front_of(*median_run)));
        }
    }
    emit("table.csv", table_csv);
    emit("table.txt", txt.str());

    std::set<std::string> problems_done;
    for (const auto& r : records) {
        if (!problems_done.insert(r.problem_name).second) continue;
        const Problem p = make_problem(r.problem_name, r.config.n);
        emit("pf_" + r.problem_name + ".csv", points_csv(p.true_pf_sample(options.pf_density)));
    }
    return written;
}

}  // namespace d2emo
