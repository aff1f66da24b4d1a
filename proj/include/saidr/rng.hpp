#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>

namespace saidr {

// Deterministic random source. The engine is the standard-specified
// mt19937_64 and every real-valued transform is implemented here, so streams
// are bit-reproducible across standard library implementations. Instances
// are never shared between concurrent callers.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t raw() { return eng_(); }

    // uniform on [0, 1)
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // unbiased integer on [0, n)
    std::uint64_t integer(std::uint64_t n) {
        const std::uint64_t limit = ~std::uint64_t{0} - ~std::uint64_t{0} % n;
        std::uint64_t x;
        do {
            x = eng_();
        } while (x >= limit);
        return x % n;
    }

    bool bernoulli(double p) { return uniform() < p; }

    double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

    double normal(double mean = 0.0, double sd = 1.0) {
        // Box-Muller, cosine branch only, so one call consumes exactly two
        // engine outputs regardless of history.
        double u1 = uniform();
        while (u1 == 0.0) u1 = uniform();
        const double u2 = uniform();
        constexpr double two_pi = 6.283185307179586476925287;
        return mean + sd * std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
    }

    template <class Vec>
    void shuffle(Vec& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[integer(i)]);
        }
    }

private:
    std::mt19937_64 eng_;
};

// Stable sub-seed for worker task `stream` of a run seeded with `seed`
// (splitmix64 finalizer).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

} // namespace saidr
