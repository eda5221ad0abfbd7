#pragma once

#include <cstdint>
#include <limits>
#include <random>

#include "qkdsec/error.hpp"

namespace qkdsec {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Deterministic random source. mt19937_64 is bit-exact across platforms; the
// samplers below avoid std::*_distribution, whose output is implementation
// defined, so a seed pins every downstream draw everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // Uniform in [0, 1), 53 random bits.
    double next_unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n). Rejection sampling, no modulo bias.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw precondition_error("Rng::below: n must be positive");
        const std::uint64_t cutoff = (0 - n) % n; // 2^64 mod n
        for (;;) {
            const std::uint64_t x = eng_();
            if (x >= cutoff) return x % n;
        }
    }

    bool bernoulli(double p) { return next_unit() < p; }

    // Independent child stream; distinct `stream` values decorrelate children
    // from each other and from the parent's continuation.
    Rng fork(std::uint64_t stream) {
        return Rng(splitmix64(eng_() ^ splitmix64(stream)));
    }

private:
    std::mt19937_64 eng_;
};

} // namespace qkdsec
