#pragma once

#include <cstdint>
#include <random>

namespace idest {

/// Portable seeded generator: std::mt19937_64 seeded through SplitMix64 with a
/// (seed, stream) pair. Distributions are implemented here rather than taken
/// from <random>, whose distribution outputs differ across standard libraries.
///
/// Algorithm id "mt64-sm-v1". Changing any sampling routine requires a new id
/// because golden files depend on the exact stream.
class Rng {
public:
    static constexpr const char* kAlgorithm = "mt64-sm-v1";

    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t nextU64() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform();
    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Uniform integer in [0, bound), bound > 0, unbiased.
    std::uint64_t below(std::uint64_t bound);
    /// Standard normal (polar Box–Muller, cached second variate).
    double normal();
    /// Exponential with unit rate.
    double exponential();

private:
    std::mt19937_64 engine_;
    double cachedNormal_ = 0.0;
    bool hasCachedNormal_ = false;
};

/// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Deterministic seed for a substream identified by a list of integers.
std::uint64_t deriveSeed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0,
                         std::uint64_t c = 0) noexcept;

} // namespace idest
