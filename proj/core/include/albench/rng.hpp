#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>
#include <vector>

namespace albench {

// All randomness in the library flows through Rng so that results are
// bit-reproducible across standard library implementations. The standard
// distributions (uniform_int_distribution etc.) are not portable, so we
// derive everything from the mt19937_64 raw stream ourselves.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Unbiased integer in [0, bound). Rejection sampling on the top bits.
    std::size_t uniform_index(std::size_t bound) {
        if (bound == 0) return 0;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t x = engine_();
        while (x >= limit) x = engine_();
        return static_cast<std::size_t>(x % bound);
    }

    // Uniform double in [0, 1) with 53 bits of precision.
    double uniform_real() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller. The spare value is discarded so the
    // stream consumed per call is fixed.
    double gaussian() {
        double u1 = uniform_real();
        while (u1 <= 0.0) u1 = uniform_real();
        const double u2 = uniform_real();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::swap(items[i - 1], items[uniform_index(i)]);
        }
    }

    // First k elements of a Fisher-Yates shuffle: a uniform
    // without-replacement sample, order randomized.
    std::vector<std::size_t> sample_without_replacement(std::size_t population,
                                                        std::size_t k) {
        std::vector<std::size_t> idx(population);
        for (std::size_t i = 0; i < population; ++i) idx[i] = i;
        for (std::size_t i = 0; i < k && i + 1 < population; ++i) {
            std::swap(idx[i], idx[i + uniform_index(population - i)]);
        }
        idx.resize(k);
        return idx;
    }

private:
    std::mt19937_64 engine_;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Deterministic named sub-stream derivation: independent seeds for the
// seed-set / per-iteration model / per-iteration query streams all hang off
// one trial seed without consuming each other's state.
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view tag) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a over the tag
    for (const char c : tag) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return splitmix64(base ^ h);
}

}  // namespace albench
