#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace n2n {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Deterministic RNG. mt19937_64 output is pinned by the standard; the
// distributions below are implemented here because std:: distribution
// algorithms are implementation-defined and results must reproduce across
// toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(splitmix64(seed)), gen_(splitmix64(seed)) {}

    // Independent stream for a pipeline stage, so that inserting or removing
    // one stage never shifts the draws of another.
    Rng substream(std::uint64_t tag) const { return Rng(state_ ^ splitmix64(tag)); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // N(mean, sigma^2) via Box-Muller (no spare caching, order-stable).
    double normal(double mean, double sigma) {
        double u1 = uniform01();
        while (u1 == 0.0) u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mean + sigma * r * std::cos(6.283185307179586476925286766559 * u2);
    }

    // Uniform integer in [0, n) by rejection, bias-free.
    std::size_t uniform_index(std::size_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v = gen_();
        while (v >= limit) v = gen_();
        return static_cast<std::size_t>(v % n);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[uniform_index(i)]);
        }
    }

    // k distinct indices from [0, n); order is the draw order.
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k) {
        std::vector<std::size_t> all(n);
        for (std::size_t i = 0; i < n; ++i) all[i] = i;
        shuffle(all);
        all.resize(k);
        return all;
    }

private:
    std::uint64_t state_;
    std::mt19937_64 gen_;
};

}  // namespace n2n
