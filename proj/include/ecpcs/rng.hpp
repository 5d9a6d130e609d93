#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace ecpcs {

// 64-bit mixing step (splitmix64 finalizer). Used for seeding and for
// deriving child-stream seeds.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Deterministic random stream with named child-stream splitting.
//
// One global seed derives independent per-subsystem streams:
//
//     Rng root(seed);
//     Rng gen  = root.child("generate");
//     Rng rras = root.child("rras");
//
// Children are derived from the parent's seed, not from its engine state,
// so drawing numbers from one stream never perturbs a sibling. The engine
// is std::mt19937_64 (its output sequence is fully specified); all
// variates below are produced from raw engine words, not from the
// standard-library distributions, so sequences are stable across
// implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(mix64(seed)) {}

    std::uint64_t seed() const { return seed_; }

    Rng child(std::string_view stream) const {
        return Rng(mix64(seed_ ^ fnv1a64(stream)));
    }

    Rng child(std::string_view stream, std::uint64_t index) const {
        return Rng(mix64(mix64(seed_ ^ fnv1a64(stream)) + index));
    }

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Uniform in (lo, hi]. Matches half-open parameter ranges like an SNR
    // drawn over (0, 30] dB.
    double uniform_open_closed(double lo, double hi) {
        return hi - (hi - lo) * uniform01();
    }

    // Uniform integer in [0, n), n >= 1. Unbiased via rejection.
    std::uint64_t uniform_int(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v = next_u64();
        while (v >= limit) v = next_u64();
        return v % n;
    }

    // Exponential with the given mean (unit mean models Rayleigh power gain).
    double exponential(double mean = 1.0) {
        return -mean * std::log1p(-uniform01());
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

}  // namespace ecpcs
