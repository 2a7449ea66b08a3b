#pragma once
// Deterministic cross-platform RNG for suite reproduction: splitmix64
// (Steele, Lea, Flood, "Fast splittable pseudorandom number generators").
// Every suite documents its seed; identical seeds give identical streams on
// every platform.

#include <cstdint>

namespace bfv {

struct SplitMix64 {
    uint64_t state = 0;

    SplitMix64() = default;
    explicit SplitMix64(uint64_t seed) : state(seed) {}

    uint64_t next() {
        uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, n); n >= 1.  Modulo reduction: the tiny bias is
    /// irrelevant for test-input generation and keeps the stream portable.
    uint64_t below(uint64_t n) { return next() % n; }

    /// Uniform integer in [lo, hi] inclusive.
    long long range(long long lo, long long hi) {
        return lo + (long long)below((uint64_t)(hi - lo + 1));
    }

    bool flip() { return next() & 1; }

    /// Independent substream: mixes the tag through one splitmix step so
    /// streams derived with different tags from the same seed do not overlap
    /// in practice.  Derivation depends only on (seed, tag), not on how much
    /// of this stream was consumed.
    static SplitMix64 derive(uint64_t seed, uint64_t tag) {
        SplitMix64 mixer(seed ^ (0xD1B54A32D192ED03ULL * (tag + 1)));
        return SplitMix64(mixer.next());
    }
};

}  // namespace bfv
