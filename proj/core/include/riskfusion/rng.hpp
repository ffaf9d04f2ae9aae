#pragma once

#include <cstdint>
#include <random>

namespace riskfusion {

/// Portable random stream: std::mt19937_64 (output fully specified by the
/// standard) with doubles built from the top 53 bits, so sequences match across
/// standard libraries. Stream i of a run with seed s is seeded with
/// splitmix64(s ^ splitmix64(i)); consecutive trace indices get decorrelated seeds.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    static std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
        return splitmix64(seed ^ splitmix64(stream));
    }

    /// Uniform in [0, 1).
    double uniform() noexcept { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) noexcept { return uniform() < p; }

    static constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

private:
    std::mt19937_64 engine_;
};

} // namespace riskfusion
