#pragma once

#include <cstdint>
#include <random>

namespace flatgp {

// Seeded random stream. The distributions are written out here rather than
// taken from <random> so that a seed reproduces the same run on any standard
// library (std::uniform_int_distribution is implementation defined).
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
        : engine_(mix(seed + 0x9e3779b97f4a7c15ULL * (stream + 1)))
    {
    }

    static constexpr result_type min() { return std::mt19937_64::min(); }
    static constexpr result_type max() { return std::mt19937_64::max(); }
    result_type operator()() { return engine_(); }

    // Uniform integer in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n)
    {
        // rejection sampling removes modulo bias
        const std::uint64_t limit = max() - (max() % n + 1) % n;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x > limit);
        return x % n;
    }

    // Uniform double in [0, 1) with 53 random bits.
    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

    bool bernoulli(double p) { return unit() < p; }

private:
    static std::uint64_t mix(std::uint64_t z)
    {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::mt19937_64 engine_;
};

// Independent streams derived from one user seed.
namespace streams {
inline constexpr std::uint64_t master = 0;
inline constexpr std::uint64_t suite = 1;
inline constexpr std::uint64_t constants = 2;
} // namespace streams

} // namespace flatgp
