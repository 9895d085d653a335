#ifndef EDGECC_RNG_HPP
#define EDGECC_RNG_HPP

#include <cmath>
#include <cstdint>

namespace edgecc {

/// SplitMix64 mixing step. Bijective on 64-bit words; used for seed
/// derivation and for initializing the main generator state.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed for replication k of a run seeded with `seed`:
///     splitmix64(seed + (k + 1) * 0x9E3779B97F4A7C15)
/// Replications are therefore independent streams, reproducible in any
/// execution order.
inline std::uint64_t derive_replication_seed(std::uint64_t seed, std::uint64_t k) {
    return splitmix64(seed + (k + 1) * 0x9E3779B97F4A7C15ULL);
}

/// xoshiro256++ with all sampling transforms implemented in-library so that
/// identical seeds give bit-identical streams on every platform (the standard
/// library's distributions are implementation-defined and would break the
/// determinism contract).
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t s = seed;
        for (auto& word : state_) {
            s = splitmix64(s);
            word = s;
        }
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1), 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in (0, 1].
    double uniform_pos() { return 1.0 - uniform(); }

    /// Exponential variate with the given rate (rate > 0).
    double exponential(double rate) { return -std::log(uniform_pos()) / rate; }

    /// Standard normal via Box-Muller (uses exactly two uniforms).
    double normal() {
        const double u1 = uniform_pos();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    /// Gamma variate, Marsaglia-Tsang squeeze method; shape > 0.
    double gamma(double shape, double scale) {
        if (shape < 1.0) {
            // Boost to shape + 1 and scale back with u^(1/shape).
            const double g = gamma(shape + 1.0, scale);
            return g * std::pow(uniform_pos(), 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x;
            double v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v * scale;
        }
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t state_[4];
};

} // namespace edgecc

#endif // EDGECC_RNG_HPP
