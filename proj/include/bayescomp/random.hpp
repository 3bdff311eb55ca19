#pragma once

#include <cstdint>

namespace bayescomp {

// Counter-based generator. Output n is the SplitMix64 finalizer applied to
// seed + n * golden-gamma, so a (seed, counter) pair pins the sequence exactly
// and draws never depend on the standard library's distribution objects.
class Stream {
public:
    using result_type = std::uint64_t;

    explicit Stream(std::uint64_t seed = 0, std::uint64_t counter = 0) noexcept
        : seed_(seed), counter_(counter) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }
    result_type operator()() noexcept { return next(); }

    std::uint64_t next() noexcept;

    // Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform() noexcept;

    // Uniform integer in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n) noexcept;

    // Independent substream keyed by `key`; the parent is left untouched.
    [[nodiscard]] Stream split(std::uint64_t key) const noexcept;

    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
    [[nodiscard]] std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t seed_;
    std::uint64_t counter_;
};

std::uint64_t mix64(std::uint64_t z) noexcept;

}  // namespace bayescomp
