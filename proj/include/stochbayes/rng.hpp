#pragma once

#include <cstdint>
#include <string_view>

namespace stochbayes {

/// SplitMix64 generator (Steele/Lea/Flood; Vigna's fixed-increment variant).
/// 64 bits of state, passes BigCrush, and cheap enough to sit inside every
/// simulated device. Streams seeded with distinct values are independent for
/// our purposes.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += UINT64_C(0x9E3779B97F4A7C15));
        z = (z ^ (z >> 30)) * UINT64_C(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)) * UINT64_C(0x94D049BB133111EB);
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1), 53 significant bits.
    double next_unit() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

private:
    std::uint64_t state_;
};

/// FNV-1a over a byte string, used to turn node ids into seed material.
inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = UINT64_C(0xCBF29CE484222325);
    for (unsigned char c : s) {
        h ^= c;
        h *= UINT64_C(0x100000001B3);
    }
    return h;
}

/// Derives a per-node seed from a master seed and the node id. Distinct ids
/// get distinct, decorrelated seeds for any master seed; the derivation is a
/// pure function so every consumer of (master_seed, id) sees the same stream.
inline std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view id) {
    SplitMix64 mixer(master_seed ^ fnv1a64(id));
    return mixer.next();
}

} // namespace stochbayes
