#pragma once

// Counter-based random streams.
//
// Every draw is a pure function of (seed, stream, counter), so experiments can
// hand each trial or variable its own stream and stay reproducible regardless
// of evaluation order.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace relq {

/// Philox4x32-10 block function (Salmon et al., SC'11).
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) {
    constexpr std::uint32_t kMul0 = 0xD2511F53u;
    constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
        const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return ctr;
}

/// SplitMix64 finalizer; used to derive stream ids from structured keys.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Stream id for sub-stream `index` of a named purpose (`tag`).
constexpr std::uint64_t derive_stream(std::uint64_t tag, std::uint64_t index) {
    return mix64(mix64(tag) ^ index);
}

// Stream tags. Values are arbitrary but frozen: changing one changes outputs.
inline constexpr std::uint64_t kStreamGaussian = 0x6761757373ull;   // shared r
inline constexpr std::uint64_t kStreamFallback = 0x66616c6cull;     // per-variable fallback
inline constexpr std::uint64_t kStreamTrial = 0x747269616cull;      // per-trial
inline constexpr std::uint64_t kStreamGenerator = 0x67656eull;      // instance generation

/// Uniform bits from Philox keyed by seed, counter space split by stream.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }
    std::uint64_t position() const { return counter_; }

    std::uint32_t next_u32() {
        if (cursor_ == 4) refill();
        return block_[cursor_++];
    }

    std::uint64_t next_u64() {
        const std::uint64_t hi = next_u32();
        return (hi << 32) | next_u32();
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1]; safe as a log argument.
    double uniform_open_zero() { return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53; }

    /// Unbiased integer in [0, bound) by rejection.
    std::uint64_t uniform_below(std::uint64_t bound) {
        if (bound == 0) throw std::invalid_argument("uniform_below: bound must be positive");
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
        for (;;) {
            const std::uint64_t x = next_u64();
            if (x < limit) return x % bound;
        }
    }

private:
    void refill() {
        const std::array<std::uint32_t, 4> ctr = {
            static_cast<std::uint32_t>(counter_), static_cast<std::uint32_t>(counter_ >> 32),
            static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
        block_ = philox4x32(ctr, {static_cast<std::uint32_t>(seed_),
                                  static_cast<std::uint32_t>(seed_ >> 32)});
        ++counter_;
        cursor_ = 0;
    }

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
    std::array<std::uint32_t, 4> block_{};
    int cursor_ = 4;
};

/// Standard normals by Box–Muller over a CounterRng.
class GaussianSampler {
public:
    GaussianSampler(std::uint64_t seed, std::uint64_t stream) : rng_(seed, stream) {}

    std::uint64_t seed() const { return rng_.seed(); }
    std::uint64_t stream() const { return rng_.stream(); }

    double next() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double radius = std::sqrt(-2.0 * std::log(rng_.uniform_open_zero()));
        const double angle = 2.0 * std::numbers::pi * rng_.uniform();
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    void fill(std::span<double> out) {
        for (double& x : out) x = next();
    }

    CounterRng& uniform_source() { return rng_; }

private:
    CounterRng rng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Draws `dim` i.i.d. standard normals.
inline std::vector<double> sample_gaussian(GaussianSampler& sampler, std::size_t dim) {
    if (dim == 0) throw std::invalid_argument("sample_gaussian: dim must be >= 1");
    std::vector<double> out(dim);
    sampler.fill(out);
    return out;
}

}  // namespace relq
