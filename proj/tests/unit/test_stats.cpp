#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"

#include "d2emo/stats.hpp"

using namespace d2emo;
using namespace d2emo::stats;

TEST_CASE("signed-rank exact p matches full enumeration") {
    std::mt19937_64 gen(83);
    std::normal_distribution<double> nd;
    std::uniform_int_distribution<int> coarse(-3, 3);
    for (int t = 0; t < 300; ++t) {
        const std::size_t n = 5 + static_cast<std::size_t>(t % 12);
        std::vector<double> a(n), b(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (t % 2) {  // integer data: ties and zero differences
                a[i] = coarse(gen);
                b[i] = coarse(gen);
            } else {
                a[i] = nd(gen) + 0.3 * (t % 5);
                b[i] = nd(gen);
            }
        }
        const auto r = wilcoxon_signed_rank(a, b);
        CAPTURE(t);
        if (r.n_effective == 0) {
            CHECK(r.p_value == 1.0);
            continue;
        }
        CHECK(r.exact);
        CHECK(r.p_value == doctest::Approx(oracle::enumerate_signed_rank_p(a, b)).epsilon(1e-12));
        CHECK(r.significant == (r.p_value < 0.05));
    }
}

TEST_CASE("signed-rank examples and guards") {
    const std::vector<double> a{1, 2, 3, 4, 5, 6, 7, 8}, b{0, 0, 0, 0, 0, 0, 0, 0};
    const auto r = wilcoxon_signed_rank(a, b);
    CHECK(r.p_value == doctest::Approx(2.0 / 256.0));
    CHECK(r.statistic == 36.0);
    CHECK(wilcoxon_signed_rank(a, a).p_value == 1.0);
    CHECK_THROWS(wilcoxon_signed_rank(std::vector<double>{1, 2, 3, 4}, std::vector<double>{0, 0, 0, 0}));
    CHECK_THROWS(wilcoxon_signed_rank(a, std::vector<double>{1, 2, 3, 4, 5}));
}

TEST_CASE("signed-rank normal approximation for large n") {
    std::mt19937_64 gen(89);
    std::normal_distribution<double> nd;
    std::vector<double> a(60), b(60);
    for (std::size_t i = 0; i < 60; ++i) {
        a[i] = nd(gen) + 0.8;
        b[i] = nd(gen);
    }
    const auto r = wilcoxon_signed_rank(a, b);
    CHECK_FALSE(r.exact);
    CHECK(r.p_value < 0.01);
    for (auto& v : a) v -= 0.8;
    const auto s = wilcoxon_signed_rank(a, b);
    CHECK(s.p_value > 0.01);
    CHECK(s.p_value <= 1.0);
}

TEST_CASE("rank-sum test") {
    const std::vector<double> lo{1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, hi{11, 12, 13, 14, 15, 16, 17, 18, 19, 20};
    const auto r = wilcoxon_rank_sum(hi, lo);
    CHECK(r.statistic == 100.0);
    CHECK(r.p_value < 0.001);
    CHECK(wilcoxon_rank_sum(lo, lo).p_value == doctest::Approx(1.0));
    // U = 0 -> z = (50 - 0.5) / sqrt(10*10*21/12)
    CHECK(wilcoxon_rank_sum(lo, hi).p_value == doctest::Approx(std::erfc(49.5 / std::sqrt(175.0) / std::sqrt(2.0))));
}

TEST_CASE("A12 examples, complementarity and classes") {
    const std::vector<double> a{1, 2, 3}, b{1, 2, 3}, c{4, 5, 6};
    CHECK(a12(a, b) == 0.5);
    CHECK(a12(c, a) == 1.0);
    CHECK(a12(a, c) == 0.0);
    std::mt19937_64 gen(97);
    std::uniform_int_distribution<int> coarse(0, 4);
    for (int t = 0; t < 1000; ++t) {
        std::vector<double> x(1 + t % 9), y(1 + t % 7);
        for (auto& v : x) v = coarse(gen);
        for (auto& v : y) v = coarse(gen);
        CHECK(a12(x, y) + a12(y, x) == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(classify_a12(0.5) == EffectSize::equal);
    CHECK(classify_a12(0.44) == EffectSize::small);
    CHECK(classify_a12(0.6) == EffectSize::small);
    CHECK(classify_a12(0.64) == EffectSize::medium);
    CHECK(classify_a12(0.3) == EffectSize::medium);
    CHECK(classify_a12(0.25) == EffectSize::large);
    CHECK(classify_a12(1.0) == EffectSize::large);
    CHECK(std::string(to_string(EffectSize::large)) == "large");
}

TEST_CASE("Scott-Knott ranks") {
    const std::vector<double> v{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    CHECK(scott_knott({{"a", v}, {"b", v}, {"c", v}}) == std::vector<int>{1, 1, 1});
    std::vector<double> high = v;
    for (auto& x : high) x += 100.0;
    CHECK(scott_knott({{"lo", v}, {"hi", high}}) == std::vector<int>{2, 1});
    std::vector<double> mid = v;
    for (auto& x : mid) x += 50.0;
    CHECK(scott_knott({{"lo", v}, {"hi", high}, {"mid", mid}, {"hi2", high}}) == std::vector<int>{3, 1, 2, 1});
    CHECK(scott_knott({{"only", v}}) == std::vector<int>{1});
}

TEST_CASE("summary statistics") {
    const std::vector<double> v{4, 1, 3, 2, 100};
    const auto s = summarize(v);
    CHECK(s.median == 3.0);
    CHECK(s.iqr == doctest::Approx(2.0));
    CHECK(s.mad == 1.0);
    CHECK(s.mean == 22.0);
    CHECK(s.std == doctest::Approx(std::sqrt((18 * 18 + 21 * 21 + 19 * 19 + 20 * 20 + 78 * 78) / 4.0)));
    CHECK(quantile({1, 2, 3, 4}, 0.5) == 2.5);
    CHECK(quantile({1, 2, 3, 4}, 0.25) == 1.75);
}
