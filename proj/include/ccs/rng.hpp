#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>

namespace ccs {

/// Seeded RNG used wherever the library needs randomness (query selection,
/// synthetic generation). mt19937_64 has a standard-mandated output
/// sequence and the derived draws below avoid implementation-defined
/// distributions, so results are reproducible across platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    /// Uniform integer in [0, bound). Rejection sampling, no modulo bias.
    std::uint64_t next_below(std::uint64_t bound) {
        if (bound == 0) throw std::invalid_argument("bound must be positive");
        std::uint64_t threshold = (0 - bound) % bound;  // 2^64 mod bound
        for (;;) {
            std::uint64_t x = eng_();
            if (x >= threshold) return x % bound;
        }
    }

    /// Uniform double in [0, 1) built from the top 53 bits.
    double next_double() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 eng_;
};

}  // namespace ccs
