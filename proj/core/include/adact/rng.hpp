#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace adact {

// Deterministic RNG built on mt19937_64 with hand-rolled distributions.
// std::normal_distribution and friends are implementation-defined, which
// would break bitwise reproducibility across standard libraries, so the
// few draws we need are spelled out here.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform on [0, 1) with 53 bits of precision.
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform();
    }

    // Box-Muller, one value per two uniform draws. The cosine branch only,
    // so the draw count per call is fixed.
    double normal(double mean, double sd) {
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();  // log(0) guard
        double z = std::sqrt(-2.0 * std::log(u1)) *
                   std::cos(2.0 * std::numbers::pi * u2);
        return mean + sd * z;
    }

    // Uniform integer in [0, n). Rejection-free modulo is fine here: n is
    // tiny relative to 2^64 so the bias is unobservable.
    std::size_t index(std::size_t n) {
        return static_cast<std::size_t>(gen_() % n);
    }

    // Seeded Fisher-Yates.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[index(i)]);
        }
    }

private:
    std::mt19937_64 gen_;
};

// Derives an independent stream for a grid cell from a base seed, so
// experiment cells can run in any order (or in parallel) without changing
// results. SplitMix64 finalizer.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t cell) {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (cell + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace adact
