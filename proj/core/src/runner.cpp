#include "d2emo/runner.hpp"

#include <atomic>
#include <chrono>
#include <future>
#include <stdexcept>
#include <thread>

#include "d2emo/doe.hpp"
#include "d2emo/hypervolume.hpp"
#include "d2emo/random.hpp"

namespace d2emo {

namespace {

constexpr std::uint64_t kInitStream = 0x1417;
constexpr std::uint64_t kSearchStream = 0x5EA7C4;
constexpr std::uint64_t kRandomStream = 0x7A4D;

class RunContext {
public:
    RunContext(const ExperimentConfig& config, std::uint64_t seed)
        : problem_(config.make_problem()), archive_(problem_.bounds()) {
        record_.config = config;
        record_.config.seeds = {seed};
        record_.seed = seed;
        record_.problem_name = problem_.name();
        record_.reconstruction = problem_.is_reconstruction();
        record_.metric_ref = problem_.metric_reference();
    }

    const Problem& problem() const { return problem_; }
    const Archive& archive() const { return archive_; }
    RunRecord& record() { return record_; }
    std::size_t remaining() const { return record_.config.fe_budget - archive_.size(); }

    /// Evaluates the batch concurrently and commits in batch order.
    std::vector<std::size_t> evaluate_and_commit(std::vector<Vector> batch) {
        std::vector<std::future<Vector>> pending;
        pending.reserve(batch.size());
        for (const auto& x : batch)
            pending.push_back(std::async(std::launch::async, [this, &x] { return problem_.evaluate(x); }));
        std::vector<std::size_t> appended;
        for (std::size_t i = 0; i < batch.size(); ++i) {
            Vector f = pending[i].get();
            appended.push_back(archive_.size());
            archive_.append(Solution{std::move(batch[i]), std::move(f), std::nullopt});
        }
        return appended;
    }

    void trace(std::size_t iteration, std::size_t candidates, std::vector<std::size_t> batch) {
        TraceEntry e;
        e.iteration = iteration;
        e.evaluations = archive_.size();
        e.archive_hv = hv2d(archive_.objective_vectors(), record_.metric_ref);
        e.candidate_count = candidates;
        e.batch = std::move(batch);
        record_.trace.push_back(std::move(e));
    }

    RunRecord finish(std::chrono::steady_clock::time_point started) {
        record_.archive = archive_.entries();
        record_.wall_clock_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        return std::move(record_);
    }

    void initialize() {
        auto design = lhs_sample({record_.config.effective_init_size(), problem_.bounds(),
                                  derive_seed(record_.seed, {kInitStream})});
        trace(0, 0, evaluate_and_commit(std::move(design)));
    }

private:
    Problem problem_;
    Archive archive_;
    RunRecord record_;
};

std::vector<GpSurrogate> fit_models(const Archive& archive, const FitOptions& options) {
    const auto X = archive.decision_vectors();
    const auto F = archive.objective_vectors();
    const std::size_t m = F.front().size();
    std::vector<std::future<GpSurrogate>> pending;
    std::vector<Vector> targets(m, Vector(F.size()));
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t i = 0; i < F.size(); ++i) targets[j][i] = F[i][j];
    for (std::size_t j = 0; j < m; ++j)
        pending.push_back(std::async(std::launch::async, [&, j] { return GpSurrogate::fit(X, targets[j], options); }));
    std::vector<GpSurrogate> models;
    for (auto& p : pending) models.push_back(p.get());
    return models;
}

std::vector<Vector> nondominated_decisions(const Archive& archive) {
    std::vector<Vector> out;
    for (std::size_t i : nondominated_filter(archive.objective_vectors())) out.push_back(archive[i].x);
    return out;
}

}  // namespace

const char* to_string(Algorithm a) noexcept { return a == Algorithm::mgd ? "mgd" : "random"; }

Algorithm parse_algorithm(std::string_view s) {
    if (s == "mgd") return Algorithm::mgd;
    if (s == "random") return Algorithm::random;
    throw std::invalid_argument("unknown algorithm '" + std::string(s) + "'");
}

const char* to_string(RunStatus s) noexcept {
    switch (s) {
        case RunStatus::completed: return "completed";
        case RunStatus::no_eligible_candidates: return "no_eligible_candidates";
        case RunStatus::fit_failed: return "fit_failed";
        case RunStatus::search_failed: return "search_failed";
    }
    return "?";
}

RunStatus parse_run_status(std::string_view s) {
    for (auto st : {RunStatus::completed, RunStatus::no_eligible_candidates, RunStatus::fit_failed, RunStatus::search_failed})
        if (s == to_string(st)) return st;
    throw std::invalid_argument("unknown run status '" + std::string(s) + "'");
}

void ExperimentConfig::validate() const {
    if (effective_init_size() < 2) throw std::invalid_argument("ExperimentConfig: init_size must be >= 2");
    if (fe_budget < effective_init_size()) throw std::invalid_argument("ExperimentConfig: fe_budget must be >= init_size");
    if (xi < 1) throw std::invalid_argument("ExperimentConfig: xi must be >= 1");
    mgd.validate();
    (void)make_problem();
}

Problem ExperimentConfig::make_problem() const { return d2emo::make_problem(problem, n, disconnect_param); }

std::vector<Vector> RunRecord::objective_vectors() const {
    std::vector<Vector> out;
    out.reserve(archive.size());
    for (const auto& s : archive) out.push_back(*s.objectives);
    return out;
}

RunRecord run(const ExperimentConfig& config, std::uint64_t seed) {
    config.validate();
    const auto started = std::chrono::steady_clock::now();
    RunContext ctx(config, seed);
    ctx.initialize();

    for (std::size_t iteration = 1; ctx.remaining() > 0; ++iteration) {
        std::vector<GpSurrogate> models;
        try {
            models = fit_models(ctx.archive(), config.fit);
        } catch (const FitError& e) {
            ctx.record().status = RunStatus::fit_failed;
            ctx.record().diagnostic = "iteration " + std::to_string(iteration) + ": " + e.what();
            break;
        }

        MgdConfig mc = config.mgd;
        mc.seed = derive_seed(seed, {kSearchStream, iteration});
        if (config.seed_from_archive) {
            const auto extra = nondominated_decisions(ctx.archive());
            mc.seed_points.insert(mc.seed_points.end(), extra.begin(), extra.end());
        }
        CandidateSet P;
        try {
            P = mgd_search(models, ctx.problem().bounds(), mc);
        } catch (const MgdError& e) {
            ctx.record().status = RunStatus::search_failed;
            ctx.record().diagnostic = "iteration " + std::to_string(iteration) + ": " + e.what();
            break;
        }

        const std::size_t xi = std::min(config.xi, ctx.remaining());
        const Vector ref = P.empty() ? Vector{} : dynamic_reference(P.predicted_objectives());
        const auto batch = P.empty() ? std::vector<Solution>{} : select_batch(P, xi, ctx.archive(), ref);
        if (batch.empty()) {
            ctx.record().status = RunStatus::no_eligible_candidates;
            ctx.record().diagnostic = "iteration " + std::to_string(iteration) +
                                      ": every candidate duplicates an archived solution";
            break;
        }
        std::vector<Vector> xs;
        for (const auto& s : batch) xs.push_back(s.x);
        ctx.trace(iteration, P.size(), ctx.evaluate_and_commit(std::move(xs)));
    }
    return ctx.finish(started);
}

RunRecord run_baseline_random(const ExperimentConfig& config, std::uint64_t seed) {
    config.validate();
    const auto started = std::chrono::steady_clock::now();
    RunContext ctx(config, seed);
    ctx.initialize();

    for (std::size_t iteration = 1; ctx.remaining() > 0; ++iteration) {
        const std::size_t xi = std::min(config.xi, ctx.remaining());
        const auto design = lhs_sample({xi, ctx.problem().bounds(), derive_seed(seed, {kRandomStream, iteration})});
        std::vector<Vector> xs;
        for (const auto& x : design) {
            if (ctx.archive().contains_near(x)) continue;
            const bool dup = std::any_of(xs.begin(), xs.end(),
                                         [&](const Vector& y) { return ctx.problem().bounds().near_duplicate(x, y); });
            if (!dup) xs.push_back(x);
        }
        if (xs.empty()) {
            ctx.record().status = RunStatus::no_eligible_candidates;
            ctx.record().diagnostic = "iteration " + std::to_string(iteration) + ": sampled batch duplicates the archive";
            break;
        }
        const std::size_t count = xs.size();
        ctx.trace(iteration, count, ctx.evaluate_and_commit(std::move(xs)));
    }
    return ctx.finish(started);
}

RunRecord run_experiment(const ExperimentConfig& config, std::uint64_t seed) {
    return config.algorithm == Algorithm::mgd ? run(config, seed) : run_baseline_random(config, seed);
}

std::vector<RunRecord> run_all(const std::vector<RunRequest>& requests, std::size_t jobs) {
    std::vector<RunRecord> out(requests.size());
    std::vector<std::exception_ptr> errors(requests.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < requests.size(); i = next++) {
            try {
                out[i] = run_experiment(requests[i].config, requests[i].seed);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    jobs = std::max<std::size_t>(1, std::min(jobs, requests.size()));
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < jobs; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

}  // namespace d2emo
