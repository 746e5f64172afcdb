#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace dss {

// Seeded RNG with hand-rolled draws. std::mt19937_64's output sequence is
// pinned by the standard but the std:: distributions are not, and seeded
// oracle runs must be bit-identical across platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1), 53-bit mantissa.
    double uniform01() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    // Uniform integer in [lo, hi]. Modulo bias is irrelevant at test scales.
    std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi) {
        return lo + gen_() % (hi - lo + 1);
    }

    bool bernoulli(double p) { return uniform01() < p; }

    // Knuth's product method; mean values here are small (expected FPs per tile).
    int poisson(double mean) {
        if (mean <= 0.0) return 0;
        const double limit = std::exp(-mean);
        double prod = uniform01();
        int n = 0;
        while (prod > limit) {
            prod *= uniform01();
            ++n;
        }
        return n;
    }

private:
    std::mt19937_64 gen_;
};

// splitmix64 finalizer; used to derive per-tile seeds from (seed, image, tile).
inline std::uint64_t mix_seed(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t combine_seed(std::uint64_t a, std::uint64_t b) {
    return mix_seed(a ^ (mix_seed(b) + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2)));
}

} // namespace dss
