#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "oracles.hpp"

#include "d2emo/hypervolume.hpp"

using namespace d2emo;

namespace {

CandidateSet candidates(const std::vector<Vector>& xs, const std::vector<Vector>& fs) {
    CandidateSet P;
    for (std::size_t i = 0; i < xs.size(); ++i) P.members.push_back({xs[i], std::nullopt, fs[i]});
    return P;
}

std::vector<Vector> without(const std::vector<Vector>& pts, std::size_t skip) {
    std::vector<Vector> out;
    for (std::size_t i = 0; i < pts.size(); ++i)
        if (i != skip) out.push_back(pts[i]);
    return out;
}

}  // namespace

TEST_CASE("hv2d hand examples") {
    const Vector ref{1.0, 1.0};
    CHECK(hv2d({{0.0, 0.0}}, ref) == 1.0);
    CHECK(hv2d({{0.0, 0.5}, {0.5, 0.0}}, ref) == 0.75);
    CHECK(hv2d({}, ref) == 0.0);
    CHECK(hv2d({{1.0, 0.0}, {0.5, 1.0}, {2.0, -1.0}}, ref) == 0.0);
    CHECK(hv2d({{0.5, 0.5}, {0.5, 0.5}, {0.6, 0.6}}, ref) == 0.25);
}

TEST_CASE("hv2d matches an exact grid oracle, including dominated points") {
    std::mt19937_64 gen(61);
    std::uniform_real_distribution<double> u(-0.2, 1.2);
    for (int t = 0; t < 200; ++t) {
        std::vector<Vector> pts(1 + static_cast<std::size_t>(t % 30));
        for (auto& p : pts) p = {u(gen), u(gen)};
        const Vector ref{1.0, 1.0};
        CHECK(hv2d(pts, ref) == doctest::Approx(oracle::grid_hv(pts, ref)).epsilon(1e-12));
    }
}

TEST_CASE("hv2d is order invariant and monotone") {
    std::mt19937_64 gen(67);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const Vector ref{1.1, 1.1};
    for (int t = 0; t < 100; ++t) {
        auto pts = oracle::random_front(gen, 2 + static_cast<std::size_t>(t % 20));
        const double base = hv2d(pts, ref);
        auto shuffled = pts;
        std::shuffle(shuffled.begin(), shuffled.end(), gen);
        CHECK(hv2d(shuffled, ref) == doctest::Approx(base).epsilon(1e-14));
        const Vector extra{u(gen), u(gen)};
        const bool nondominated = std::none_of(pts.begin(), pts.end(), [&](const Vector& p) {
            return oracle::weakly_better_everywhere(p, extra);
        });
        pts.push_back(extra);
        if (nondominated) CHECK(hv2d(pts, ref) > base);
        else CHECK(hv2d(pts, ref) == doctest::Approx(base).epsilon(1e-14));
    }
}

TEST_CASE("ihv hand examples") {
    const Vector ref{1.0, 1.0};
    const auto c = ihv({{0.0, 0.5}, {0.5, 0.0}, {0.6, 0.6}}, ref);
    CHECK(c[0] == doctest::Approx(0.25));
    CHECK(c[1] == doctest::Approx(0.25));
    CHECK(c[2] == 0.0);
    CHECK(ihv({{0.0, 0.0}}, ref) == Vector{1.0});
    const auto d = ihv({{0.2, 0.2}, {0.2, 0.2}}, ref);
    CHECK(d == Vector{0.0, 0.0});
    CHECK(ihv({}, ref).empty());
}

TEST_CASE("ihv equals leave-one-out recomputation") {
    std::mt19937_64 gen(71);
    std::uniform_real_distribution<double> u(0.0, 1.2);
    std::uniform_int_distribution<int> coarse(0, 5);
    for (int t = 0; t < 300; ++t) {
        std::vector<Vector> pts(1 + static_cast<std::size_t>(t % 25));
        for (auto& p : pts) p = t % 3 == 0 ? Vector{coarse(gen) / 5.0, coarse(gen) / 5.0} : Vector{u(gen), u(gen)};
        const Vector ref{1.0, 1.0};
        const double total = hv2d(pts, ref);
        const auto c = ihv(pts, ref);
        double sum = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            CHECK(c[i] >= 0.0);
            CHECK(c[i] == doctest::Approx(total - hv2d(without(pts, i), ref)).epsilon(1e-12).scale(1.0));
            sum += c[i];
        }
        CHECK(sum <= total + 1e-12);
    }
}

TEST_CASE("hv2d agrees with Monte-Carlo sampling") {
    std::mt19937_64 gen(73);
    const Vector ref{1.0, 1.0};
    const auto pts = oracle::random_front(gen, 200);
    const double exact = hv2d(pts, ref);
    CHECK(oracle::monte_carlo_hv(pts, {0.0, 0.0}, ref, 200000, 5) == doctest::Approx(exact).epsilon(0.01));
    CHECK(hv_monte_carlo(pts, ref, 200000, 9) == doctest::Approx(exact).epsilon(0.01));
    const std::vector<Vector> cube{{0.5, 0.5, 0.5}};
    CHECK(hv_monte_carlo(cube, Vector{1.0, 1.0, 1.0}, 1000, 1) == doctest::Approx(0.125));
}

TEST_CASE("dynamic reference point") {
    CHECK(dynamic_reference({{0.0, 1.0}, {1.0, 0.0}}) == Vector{1.1, 1.1});
    const auto r = dynamic_reference({{0.3, 2.0}, {0.3, 4.0}});
    CHECK(r[0] == doctest::Approx(0.3 + 1e-6));
    CHECK(r[1] == doctest::Approx(4.2));
}

TEST_CASE("batch selection ranks by contribution and excludes duplicates") {
    const Vector ref{1.0, 1.0};
    const auto P = candidates({{0.1}, {0.2}, {0.3}}, {{0.0, 0.5}, {0.5, 0.0}, {0.25, 0.25}});
    const auto c = ihv(P.predicted_objectives(), ref);
    CHECK(c[0] == doctest::Approx(0.125));
    CHECK(c[1] == doctest::Approx(0.125));
    CHECK(c[2] == doctest::Approx(0.0625));

    Archive empty(Bounds::unit(1));
    CHECK(select_batch_indices(P, 2, empty, ref) == std::vector<std::size_t>{0, 1});
    CHECK(select_batch_indices(P, 10, empty, ref).size() == 3);

    Archive archive(Bounds::unit(1));
    archive.append({{0.1}, Vector{9.0, 9.0}, std::nullopt});
    CHECK(select_batch_indices(P, 2, archive, ref) == std::vector<std::size_t>{1, 2});

    const auto twins = candidates({{0.4}, {0.4}, {0.7}}, {{0.0, 0.5}, {0.0, 0.5}, {0.5, 0.0}});
    const auto idx = select_batch_indices(twins, 3, empty, ref);
    CHECK(idx == std::vector<std::size_t>{2, 0});
    const auto batch = select_batch(twins, 3, empty, ref);
    REQUIRE(batch.size() == 2);
    CHECK(batch[0].x == Vector{0.7});
    CHECK_THROWS(select_batch_indices(P, 0, empty, ref));

    const auto only_dupes = candidates({{0.1}}, {{0.0, 0.0}});
    CHECK(select_batch_indices(only_dupes, 5, archive, ref).empty());
}
