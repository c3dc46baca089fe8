#pragma once

// Seedable 64-bit generator (xoshiro256++) with deterministic per-replica
// stream derivation. All samplers below are written out explicitly instead
// of going through <random> distributions: a fixed (seed, stream) pair
// reproduces the draw sequence exactly across runs and thread counts, with
// no dependence on a standard library's unspecified distribution algorithms.

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace flownoise {

namespace detail {

// SplitMix64, used only to expand seeds into xoshiro state.
inline std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl64(std::uint64_t v, int k) {
    return (v << k) | (v >> (64 - k));
}

}  // namespace detail

class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& w : state_) w = detail::splitmix64(x);
    }

    // Independent stream for replica `index` of a run seeded with `seed`.
    // Streams are derived by re-keying SplitMix64, not by jumping, so any
    // subset of replicas can be generated in any order (or in parallel)
    // with identical results.
    static Rng stream(std::uint64_t seed, std::uint64_t index) {
        std::uint64_t x = seed ^ (0xD1B54A32D192ED03ULL * (index + 1));
        Rng r(0);
        for (auto& w : r.state_) w = detail::splitmix64(x);
        return r;
    }

    std::uint64_t next_u64() {
        const std::uint64_t result =
            detail::rotl64(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = detail::rotl64(state_[3], 45);
        return result;
    }

    // Uniform on [0,1), 53 random bits.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    // Uniform on {0,...,n-1} via rejection (no modulo bias).
    std::uint64_t uniform_int(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("uniform_int: n must be > 0");
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return v % n;
    }

    bool bernoulli(double p) { return uniform() < p; }

    // Standard normal, Box-Muller (both variates consume fixed RNG budget;
    // the sine branch is discarded to keep the draw count deterministic).
    double normal() {
        double u1 = uniform();
        if (u1 < 0x1.0p-53) u1 = 0x1.0p-53;
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(6.283185307179586476925286766559 * u2);
    }

    // Standard exponential (rate 1).
    double exponential() {
        double u = uniform();
        if (u < 0x1.0p-53) u = 0x1.0p-53;
        return -std::log(u);
    }

    // Gamma(shape, scale 1), Marsaglia-Tsang; shapes < 1 are boosted via
    // G(a) = G(a+1) * U^(1/a).
    double gamma(double shape) {
        if (!(shape > 0.0)) throw std::invalid_argument("gamma: shape must be > 0");
        if (shape < 1.0) {
            double u = uniform();
            if (u < 0x1.0p-53) u = 0x1.0p-53;
            return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    // Beta(a, b) as the two-Gamma ratio G_a / (G_a + G_b).
    double beta(double a, double b) {
        const double x = gamma(a);
        const double y = gamma(b);
        return x / (x + y);
    }

private:
    std::array<std::uint64_t, 4> state_{};
};

}  // namespace flownoise
