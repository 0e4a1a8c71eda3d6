// Deterministic randomness utilities.  Every stochastic routine in the
// library takes an explicit 64-bit seed; sub-streams are derived with
// derive_seed so batches can run in parallel and still replay bit-for-bit
// at any thread count.
#pragma once

#include "listop/common.hpp"

#include <algorithm>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace listop {

/// SplitMix64-style finalizer; a pure integer mix with fixed outputs across
/// platforms.
inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

/// Stable FNV-1a hash of a label; independent of platform and locale.
inline std::uint64_t stable_hash64(std::string_view label) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : label) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

/// Sub-seed derivation: finalizer over (master XOR hash(label) XOR index*phi).
inline std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view label,
                                 std::uint64_t index = 0) {
    return mix64(master_seed ^ stable_hash64(label) ^ (index * 0x9E3779B97F4A7C15ull));
}

/// mt19937_64 (standardized stream) with rejection-sampled bounded draws so
/// results do not depend on any library's distribution internals.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next() { return gen_(); }

    /// Uniform value in [0, bound); bound >= 1.
    std::uint64_t below(std::uint64_t bound) {
        if (bound == 0) throw input_error("Rng::below: zero bound");
        if (bound == 1) return 0;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t x;
        do {
            x = gen_();
        } while (x >= limit);
        return x % bound;
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i)
            std::swap(v[i - 1], v[below(i)]);
    }

    /// Uniform t-subset of [0, n), returned in ascending order.
    std::vector<std::uint32_t> subset(std::uint32_t n, std::uint32_t t) {
        if (t > n) throw input_error("Rng::subset: t > n");
        std::vector<std::uint32_t> pool(n);
        for (std::uint32_t i = 0; i < n; ++i) pool[i] = i;
        for (std::uint32_t i = 0; i < t; ++i)
            std::swap(pool[i], pool[i + below(n - i)]);
        pool.resize(t);
        std::sort(pool.begin(), pool.end());
        return pool;
    }

    /// Uniform permutation of [0, n).
    std::vector<std::uint32_t> permutation(std::uint32_t n) {
        std::vector<std::uint32_t> p(n);
        for (std::uint32_t i = 0; i < n; ++i) p[i] = i;
        shuffle(p);
        return p;
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace listop
