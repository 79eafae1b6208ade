// Deterministic random streams and seed derivation.
//
// Every stochastic component of a simulation owns its own RngStream so that
// changing one part of the pipeline (e.g. ablating the channel) does not
// perturb draws elsewhere. Streams are seeded through derive_seed, a
// splitmix64-style avalanche mix of (master seed, cell, repetition).
#pragma once

#include <cstdint>
#include <random>

namespace netcomm {

// splitmix64 finalizer; bijective on 64-bit values.
inline constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Stable across versions: documented as mix64(mix64(mix64(master) ^ cell) ^ rep).
inline constexpr std::uint64_t derive_seed(std::uint64_t master,
                                           std::uint64_t cell,
                                           std::uint64_t rep) noexcept {
    return mix64(mix64(mix64(master) ^ cell) ^ rep);
}

// Thin wrapper around std::mt19937_64 with fully specified draw helpers.
// The helpers avoid std::uniform_*_distribution, whose output is not pinned
// by the standard, so a given seed yields the same sequence everywhere.
class RngStream {
public:
    RngStream() : engine_(0) {}
    explicit RngStream(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n). Debiased multiply-shift (Lemire).
    int uniform_int(int n) {
        const std::uint64_t bound = static_cast<std::uint64_t>(n);
        while (true) {
            const std::uint64_t x = next_u64();
            const unsigned __int128 m =
                static_cast<unsigned __int128>(x) * static_cast<unsigned __int128>(bound);
            const std::uint64_t lo = static_cast<std::uint64_t>(m);
            if (lo >= bound || lo >= (-bound) % bound) {
                return static_cast<int>(static_cast<std::uint64_t>(m >> 64));
            }
        }
    }

    bool bernoulli(double p) { return uniform01() < p; }

    // Uniform on [-limit, limit); used for weight initialization.
    double uniform_symmetric(double limit) {
        return (2.0 * uniform01() - 1.0) * limit;
    }

private:
    std::mt19937_64 engine_;
};

} // namespace netcomm
