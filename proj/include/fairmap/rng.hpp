#pragma once

#include <cstdint>
#include <random>

namespace fairmap {

/// SplitMix64 finalizer, used for seeding and stream derivation.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed of child stream `index` under `seed`:
///   splitmix64(seed ^ splitmix64(index + 0x9E3779B97F4A7C15)).
/// Datasets draw instance k from child_seed(spec_seed, k), so output does not
/// depend on generation order or thread count.
std::uint64_t child_seed(std::uint64_t seed, std::uint64_t index) noexcept;

/// Portable random source: mt19937_64 bits with hand-rolled conversions
/// (the std distributions differ between standard libraries).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    static Rng child(std::uint64_t seed, std::uint64_t index) { return Rng(child_seed(seed, index)); }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Exponential with rate 1.
    double exponential();

    /// Uniform integer in [0, bound); bound must be positive.
    std::uint64_t below(std::uint64_t bound);

    bool bernoulli(double p) { return uniform01() < p; }

private:
    std::mt19937_64 engine_;
};

} // namespace fairmap
