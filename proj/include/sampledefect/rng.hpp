#pragma once

#include <cstdint>
#include <limits>
#include <unordered_set>
#include <vector>

#include "sampledefect/error.hpp"

namespace sbd {

// 64-bit splitmix generator (Steele, Lea & Flood, 2014). Chosen over
// std::mt19937_64 + std::uniform_int_distribution because the distribution's
// algorithm is implementation-defined; every draw here is specified bit by
// bit, so outputs are identical across compilers and standard libraries.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform draw from [0, bound) without modulo bias (Lemire's
    // multiply-shift with rejection).
    std::uint64_t bounded(std::uint64_t bound) {
        if (bound == 0) throw InputError("bounded draw: bound must be positive");
        unsigned __int128 m = static_cast<unsigned __int128>(next()) * bound;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (lo < threshold) {
                m = static_cast<unsigned __int128>(next()) * bound;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

  private:
    std::uint64_t state_;
};

// Seed for replicate `index` of a run keyed by `master`. This is the
// splitmix64 output at stream position index+1, i.e.
//   s = master + (index + 1) * 0x9E3779B97F4A7C15   (mod 2^64)
//   z = s;  z ^= z >> 30;  z *= 0xBF58476D1CE4E5B9;
//           z ^= z >> 27;  z *= 0x94D049BB133111EB;  z ^= z >> 31
// Replicates can therefore be drawn in any order (or in parallel) and still
// reproduce the sequential results exactly.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t z = master + (index + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// k distinct indices from {0, ..., n_total-1}, uniformly without replacement.
// Small k uses Floyd's algorithm (no O(n) allocation); otherwise a partial
// Fisher-Yates shuffle. The returned order is unspecified; callers that need
// a canonical form should treat the result as a set.
inline std::vector<std::uint32_t> sample_indices(std::uint32_t n_total, std::uint32_t k,
                                                 SplitMix64& rng) {
    if (k > n_total) throw InputError("sample_indices: k exceeds population size");
    std::vector<std::uint32_t> out;
    out.reserve(k);
    if (k == 0) return out;
    if (static_cast<std::uint64_t>(k) * 64 <= n_total) {
        std::unordered_set<std::uint32_t> chosen;
        chosen.reserve(k * 2);
        for (std::uint32_t j = n_total - k; j < n_total; ++j) {
            const auto t = static_cast<std::uint32_t>(rng.bounded(j + 1));
            if (!chosen.insert(t).second) chosen.insert(j);
        }
        out.assign(chosen.begin(), chosen.end());
        return out;
    }
    std::vector<std::uint32_t> pool(n_total);
    for (std::uint32_t i = 0; i < n_total; ++i) pool[i] = i;
    for (std::uint32_t i = 0; i < k; ++i) {
        const auto j = i + static_cast<std::uint32_t>(rng.bounded(n_total - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
}

} // namespace sbd
