// Hot paths of one optimization iteration: GP fitting, mean+gradient
// evaluation, MGD search, and the HV/IHV/dominance kernels used for infill.
#include <algorithm>
#include <vector>

#include <benchmark/benchmark.h>

#include "d2emo/core.hpp"
#include "d2emo/doe.hpp"
#include "d2emo/hypervolume.hpp"
#include "d2emo/mgd.hpp"
#include "d2emo/problems.hpp"
#include "d2emo/random.hpp"
#include "d2emo/surrogate.hpp"

using namespace d2emo;

namespace {

std::vector<Vector> front(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    Vector xs(n), ys(n);
    for (auto& v : xs) v = rng.uniform();
    for (auto& v : ys) v = rng.uniform();
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end(), std::greater<>());
    std::vector<Vector> pts;
    for (std::size_t i = 0; i < n; ++i) pts.push_back({xs[i], ys[i]});
    return pts;
}

std::vector<Vector> cloud(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Vector> pts(n, Vector(2));
    for (auto& p : pts) p = {rng.uniform(), rng.uniform()};
    return pts;
}

struct Training {
    std::vector<Vector> X;
    Vector f1, f2;
};

Training zdt3_training(std::size_t N) {
    const Problem p = make_problem("zdt3", 3);
    Training t{lhs_sample({N, p.bounds(), 7}), {}, {}};
    for (const auto& x : t.X) {
        const auto f = p.evaluate(x);
        t.f1.push_back(f[0]);
        t.f2.push_back(f[1]);
    }
    return t;
}

void BM_hv2d(benchmark::State& state) {
    const auto pts = cloud(static_cast<std::size_t>(state.range(0)), 1);
    const Vector ref{1.0, 1.0};
    for (auto _ : state) benchmark::DoNotOptimize(hv2d(pts, ref));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_hv2d)->RangeMultiplier(4)->Range(16, 4096)->Complexity();

void BM_ihv(benchmark::State& state) {
    const auto pts = front(static_cast<std::size_t>(state.range(0)), 2);
    const Vector ref{1.1, 1.1};
    for (auto _ : state) benchmark::DoNotOptimize(ihv(pts, ref));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ihv)->RangeMultiplier(4)->Range(16, 4096)->Complexity();

void BM_nondominated_filter(benchmark::State& state) {
    const auto pts = cloud(static_cast<std::size_t>(state.range(0)), 3);
    for (auto _ : state) benchmark::DoNotOptimize(nondominated_filter(pts));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_nondominated_filter)->RangeMultiplier(4)->Range(16, 4096)->Complexity();

void BM_crowding_truncate(benchmark::State& state) {
    const auto pts = front(static_cast<std::size_t>(state.range(0)), 4);
    for (auto _ : state) benchmark::DoNotOptimize(crowding_truncate(pts, 200));
}
BENCHMARK(BM_crowding_truncate)->Arg(400)->Arg(1600);

void BM_gp_fit(benchmark::State& state) {
    const auto t = zdt3_training(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(GpSurrogate::fit(t.X, t.f2));
}
BENCHMARK(BM_gp_fit)->Arg(32)->Arg(128)->Arg(250)->Unit(benchmark::kMillisecond);

void BM_mean_and_gradient(benchmark::State& state) {
    const auto t = zdt3_training(static_cast<std::size_t>(state.range(0)));
    const auto gp = GpSurrogate::fit(t.X, t.f2);
    const Vector z{0.3, 0.2, 0.1};
    Vector g(3);
    for (auto _ : state) benchmark::DoNotOptimize(gp.mean_and_gradient(z, g));
}
BENCHMARK(BM_mean_and_gradient)->Arg(32)->Arg(250);

void BM_min_norm_weights(benchmark::State& state) {
    Rng rng(5);
    std::vector<Vector> g(static_cast<std::size_t>(state.range(0)), Vector(8));
    for (auto& v : g)
        for (auto& x : v) x = rng.normal();
    for (auto _ : state) benchmark::DoNotOptimize(min_norm_weights(g));
}
BENCHMARK(BM_min_norm_weights)->Arg(2)->Arg(3)->Arg(5);

void BM_mgd_search(benchmark::State& state) {
    const auto t = zdt3_training(static_cast<std::size_t>(state.range(0)));
    const std::vector<GpSurrogate> models{GpSurrogate::fit(t.X, t.f1), GpSurrogate::fit(t.X, t.f2)};
    MgdConfig c;
    c.seed = 11;
    const Bounds b = Bounds::unit(3);
    for (auto _ : state) benchmark::DoNotOptimize(mgd_search(models, b, c));
}
BENCHMARK(BM_mgd_search)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
