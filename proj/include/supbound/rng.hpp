// SPDX-License-Identifier: MIT
//
// Seeded substreams: one SplitMix64 generator per (seed, stream index), so
// results do not depend on how streams are scheduled across threads.
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace supbound {

// Recorded in ensemble files; bump the suffix if the derivation changes.
inline constexpr std::string_view kRngName = "splitmix64-boxmuller/v1";

inline constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class SplitMix64 {
public:
    explicit constexpr SplitMix64(std::uint64_t state) noexcept : state_(state) {}

    // Independent stream for `index` under `seed`.
    static constexpr SplitMix64 stream(std::uint64_t seed, std::uint64_t index) noexcept {
        return SplitMix64(mix64(mix64(seed) ^ mix64(index + 0x9e3779b97f4a7c15ULL)));
    }

    constexpr std::uint64_t next() noexcept { return mix64(state_ += 0x9e3779b97f4a7c15ULL); }

    // Uniform on the open interval (0, 1).
    constexpr double uniform() noexcept { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

// Box-Muller; consumes two uniforms per pair of standard normals.
class NormalStream {
public:
    explicit NormalStream(SplitMix64 gen) noexcept : gen_(gen) {}

    double next() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double radius = std::sqrt(-2.0 * std::log(gen_.uniform()));
        const double angle = 2.0 * std::numbers::pi * gen_.uniform();
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    SplitMix64 gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace supbound
