#pragma once

// Small population builders shared across the test suites.

#include <string>
#include <vector>

#include "sampledefect/population.hpp"
#include "sampledefect/rng.hpp"

namespace fixtures {

inline sbd::Population binary_population(const std::vector<double>& y) {
    std::vector<std::string> ids;
    ids.reserve(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) ids.push_back("u" + std::to_string(i));
    return sbd::Population(std::move(ids), y);
}

inline sbd::SampleMembership membership_of(std::vector<std::uint8_t> flags) {
    return sbd::SampleMembership(std::move(flags));
}

// Uniform y values in [0, 10) from a seeded stream.
inline sbd::Population random_population(std::size_t n, std::uint64_t seed) {
    sbd::SplitMix64 rng(seed);
    std::vector<double> y(n);
    for (auto& v : y) v = 10.0 * static_cast<double>(rng.next() >> 11) * 0x1.0p-53;
    return binary_population(y);
}

// Random non-degenerate membership (0 < n < N).
inline sbd::SampleMembership random_membership(std::size_t n_pop, std::uint64_t seed) {
    sbd::SplitMix64 rng(seed);
    const auto n = 1 + rng.bounded(n_pop - 1);
    auto idx = sbd::sample_indices(static_cast<std::uint32_t>(n_pop),
                                   static_cast<std::uint32_t>(n), rng);
    return sbd::SampleMembership::from_indices(n_pop, idx);
}

} // namespace fixtures
