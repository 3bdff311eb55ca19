#include "bayescomp/random.hpp"

namespace bayescomp {

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
}

std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t Stream::next() noexcept {
    ++counter_;
    return mix64(seed_ + counter_ * kGolden);
}

double Stream::uniform() noexcept {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
}

std::uint64_t Stream::below(std::uint64_t n) noexcept {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
        const std::uint64_t r = next();
        if (r >= threshold) return r % n;
    }
}

Stream Stream::split(std::uint64_t key) const noexcept {
    return Stream(mix64(seed_ ^ mix64(key + kGolden)) ^ 0x5851f42d4c957f2dULL, 0);
}

}  // namespace bayescomp
