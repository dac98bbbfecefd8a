#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace rbis {

/// Seeded deterministic random stream. Every consumer (clock jitter, message
/// loss, scope noise, ...) owns its own stream derived from the scenario seed
/// and a stream tag, so adding or removing one consumer never perturbs the
/// draws of another. Gaussian variates use an explicit Box-Muller transform
/// rather than std::normal_distribution to keep trajectories bit-identical
/// across standard libraries.
class RandomStream {
public:
    RandomStream() : RandomStream(0, 0) {}

    RandomStream(std::uint64_t seed, std::uint64_t stream_tag)
        : engine_(mix(mix(seed ^ 0x9e3779b97f4a7c15ull) ^ stream_tag)) {}

    /// Uniform in [0, 1), 53 random bits.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Standard normal variate.
    double gaussian() {
        const double u1 = 1.0 - uniform01();             // (0, 1]
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    bool bernoulli(double p) {
        if (p <= 0.0) return false;
        if (p >= 1.0) return true;
        return uniform01() < p;
    }

    std::uint64_t next_u64() { return engine_(); }

private:
    static std::uint64_t mix(std::uint64_t x) {
        // splitmix64 finalizer
        x += 0x9e3779b97f4a7c15ull;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
        return x ^ (x >> 31);
    }

    std::mt19937_64 engine_;
};

} // namespace rbis
