// Deterministic randomness built on the SplitMix64 mixer.  All experiment
// streams are derived as hash(seed, label...) so results do not depend on
// evaluation order; identical seeds give bit-identical runs.
#pragma once

#include <cstdint>
#include <initializer_list>
#include <vector>

namespace netcap {

// Finalizer from the SplitMix64 generator (Steele, Lea, Flood 2014).
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Hash a seed together with substream labels (trial index, stage, ...).
inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> parts) {
    std::uint64_t h = mix64(seed);
    for (std::uint64_t p : parts) h = mix64(h ^ mix64(p));
    return h;
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Index drawn from the distribution whose cumulative sums are `cum`
    // (cum.back() is treated as the total mass).
    std::size_t categorical_from_cum(const std::vector<double>& cum) {
        const double u = next_unit() * cum.back();
        std::size_t lo = 0, hi = cum.size() - 1;
        while (lo < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (u < cum[mid]) hi = mid; else lo = mid + 1;
        }
        return lo;
    }

    // Uniform index in [0, n).
    std::size_t uniform_index(std::size_t n) {
        return static_cast<std::size_t>(next_unit() * static_cast<double>(n)) % n;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

private:
    std::uint64_t state_;
};

}  // namespace netcap
