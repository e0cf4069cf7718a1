#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace sift {

// SplitMix64 (Steele, Lea, Flood 2014). Chosen over std:: engines because all
// draws are defined bit-for-bit here, so seeded outputs are identical across
// standard libraries and platforms. Streams are split by hashing (seed, stream)
// through the finalizer, which keeps per-address / per-tree / per-fold output
// independent of scheduling.
class SplitMix64 {
public:
    explicit SplitMix64(uint64_t seed) : state_(seed) {}

    static uint64_t mix(uint64_t z) {
        z += 0x9E3779B97F4A7C15ull;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 random mantissa bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n), unbiased via rejection. n must be > 0.
    uint64_t next_below(uint64_t n) {
        uint64_t threshold = (0 - n) % n;
        for (;;) {
            uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    // Standard normal via Box-Muller (no cached second value).
    double next_normal() {
        double u1 = next_double();
        double u2 = next_double();
        // Guard against log(0).
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    uint64_t state_;
};

// Derives an independent sub-seed for stream `stream` of a master seed.
inline uint64_t derive_seed(uint64_t seed, uint64_t stream) {
    return SplitMix64::mix(seed ^ SplitMix64::mix(stream ^ 0xA3C59AC2ull));
}

} // namespace sift
