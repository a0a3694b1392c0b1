#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace aoifleet {

// Deterministic, platform-independent RNG. Every random decision in a run is
// drawn from a named sub-stream derived from one master seed, so streams can
// be added or consumed at different rates without perturbing each other.

constexpr std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (char c : s) {
        h ^= static_cast<std::uint8_t>(c);
        h *= 0x100000001b3ull;
    }
    return h;
}

constexpr std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// xoshiro256++ core.
class RngStream {
public:
    RngStream() : RngStream(0) {}

    explicit RngStream(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : state_) w = splitmix64(sm);
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

    // Uniform in [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n). Lemire's multiply-shift with rejection.
    std::uint32_t uniform_below(std::uint32_t n) {
        std::uint32_t x = static_cast<std::uint32_t>(next_u64() >> 32);
        std::uint64_t m = static_cast<std::uint64_t>(x) * n;
        auto lo = static_cast<std::uint32_t>(m);
        if (lo < n) {
            const std::uint32_t threshold = (0u - n) % n;
            while (lo < threshold) {
                x = static_cast<std::uint32_t>(next_u64() >> 32);
                m = static_cast<std::uint64_t>(x) * n;
                lo = static_cast<std::uint32_t>(m);
            }
        }
        return static_cast<std::uint32_t>(m >> 32);
    }

    // Exponential inter-arrival gap for a Poisson process of the given rate.
    double exponential(double rate_per_s) { return -std::log1p(-uniform01()) / rate_per_s; }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4];
};

// Sub-stream addressing: (master seed, stream name, index) -> generator.
inline RngStream make_stream(std::uint64_t master_seed, std::string_view name,
                             std::uint64_t index = 0) {
    std::uint64_t sm = master_seed ^ fnv1a64(name);
    std::uint64_t mixed = splitmix64(sm);
    sm = mixed ^ (0x9e3779b97f4a7c15ull * (index + 1));
    return RngStream(splitmix64(sm));
}

}  // namespace aoifleet
