#include <algorithm>
#include <cstdint>
#include <numeric>
#include <set>
#include <vector>

#include <doctest.h>

#include "n2n/rng.hpp"
#include "oracles.hpp"

TEST_CASE("identical seeds reproduce identical streams") {
    n2n::Rng a(123), b(123);
    for (int i = 0; i < 1000; ++i) CHECK(a.uniform01() == b.uniform01());
}

TEST_CASE("different seeds diverge") {
    n2n::Rng a(1), b(2);
    int same = 0;
    for (int i = 0; i < 100; ++i) {
        if (a.uniform01() == b.uniform01()) ++same;
    }
    CHECK(same < 5);
}

TEST_CASE("substreams are deterministic and independent of the parent") {
    const n2n::Rng parent(77);
    n2n::Rng s1 = parent.substream(1);
    n2n::Rng s1_again = parent.substream(1);
    n2n::Rng s2 = parent.substream(2);
    n2n::Rng p = parent;
    double first_s1 = s1.uniform01();
    CHECK(first_s1 == s1_again.uniform01());
    CHECK(first_s1 != s2.uniform01());
    CHECK(first_s1 != p.uniform01());
}

TEST_CASE("uniform01 stays in [0, 1)") {
    n2n::Rng rng(5);
    for (int i = 0; i < 100000; ++i) {
        const double u = rng.uniform01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("uniform(lo, hi) respects its interval and mean") {
    n2n::Rng rng(6);
    std::vector<double> draws(50000);
    for (double& d : draws) {
        d = rng.uniform(-2.0, 3.0);
        CHECK(d >= -2.0);
        CHECK(d < 3.0);
    }
    const auto [mean, stdev] = oracle::mean_std(draws);
    CHECK(mean == doctest::Approx(0.5).epsilon(0.05));
    // Uniform on a width-5 interval has std 5/sqrt(12).
    CHECK(stdev == doctest::Approx(5.0 / std::sqrt(12.0)).epsilon(0.05));
}

TEST_CASE("normal draws have the requested moments") {
    n2n::Rng rng(8);
    std::vector<double> draws(200000);
    for (double& d : draws) d = rng.normal(1.5, 2.0);
    const auto [mean, stdev] = oracle::mean_std(draws);
    CHECK(mean == doctest::Approx(1.5).epsilon(0.02));
    CHECK(stdev == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("uniform_index covers [0, n) roughly uniformly") {
    n2n::Rng rng(9);
    const std::size_t n = 7;
    std::vector<std::size_t> counts(n, 0);
    const int draws = 70000;
    for (int i = 0; i < draws; ++i) {
        const std::size_t v = rng.uniform_index(n);
        REQUIRE(v < n);
        ++counts[v];
    }
    // Each bucket expects 10000 with std ~sqrt(10000*(6/7)) ~ 93; allow 6 sigma.
    for (std::size_t c : counts) {
        CHECK(c > 10000 - 600);
        CHECK(c < 10000 + 600);
    }
}

TEST_CASE("shuffle produces a permutation") {
    n2n::Rng rng(10);
    std::vector<int> v(257);
    std::iota(v.begin(), v.end(), 0);
    const std::vector<int> orig = v;
    rng.shuffle(v);
    CHECK(v != orig);
    std::vector<int> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == orig);
}

TEST_CASE("sample_without_replacement returns k distinct indices") {
    n2n::Rng rng(11);
    const auto picks = rng.sample_without_replacement(50, 20);
    CHECK(picks.size() == 20);
    std::set<std::size_t> uniq(picks.begin(), picks.end());
    CHECK(uniq.size() == 20);
    for (std::size_t p : picks) CHECK(p < 50);

    const auto all = rng.sample_without_replacement(10, 10);
    std::set<std::size_t> every(all.begin(), all.end());
    CHECK(every.size() == 10);
}

TEST_CASE("splitmix64 scrambles consecutive inputs") {
    std::set<std::uint64_t> outs;
    for (std::uint64_t i = 0; i < 1000; ++i) outs.insert(n2n::splitmix64(i));
    CHECK(outs.size() == 1000);
    // Deterministic: same input, same output.
    CHECK(n2n::splitmix64(42) == n2n::splitmix64(42));
}
