// rng.hpp
// SplitMix64. The constants below are part of the report format: any
// reimplementation must use them to reproduce seeded reports.
//   state += 0x9E3779B97F4A7C15
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   z ^= z >> 31
// Doubles use the top 53 bits: (z >> 11) * 2^-53.

#pragma once

#include <cstdint>

#include "vekua/biquaternion.hpp"

namespace vekua {

class SplitMix64 {
public:
    explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

    constexpr std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // [0, 1)
    constexpr double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    constexpr double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    Complex complex_unit_box() {
        const double re = uniform(-1.0, 1.0);
        const double im = uniform(-1.0, 1.0);
        return {re, im};
    }

    /// Components uniform in [-1,1]^2, drawn in order re0, im0, re1, ...
    Biquaternion biquaternion() {
        Biquaternion q;
        for (std::size_t k = 0; k < 4; ++k) q[k] = complex_unit_box();
        return q;
    }

private:
    std::uint64_t state_;
};

}  // namespace vekua
