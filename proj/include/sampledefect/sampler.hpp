#pragma once

#include <cstdint>
#include <vector>

#include "json.hpp"

#include "sampledefect/population.hpp"

namespace sbd {

enum class SamplerKind { srs, targeted_rho };

struct SamplerSpec {
    SamplerKind kind = SamplerKind::srs;
    std::size_t n = 0;
    double target_rho = 0; // targeted_rho only
    std::uint64_t seed = 0;
};

struct RhoRange {
    double lo = 0;
    double hi = 0;
};

// Membership factory for one population and design. Construction validates
// the design against the population (and, for targeted_rho, resolves the
// two-stratum allocation), so repeated draws only pay for the random picks.
//
// The targeted_rho design hits a requested defect correlation on a binary
// population by fixing the number of sampled ones:
//   n1 = round(N * (f*p + rho * sigma_R * sigma_Y)),   n0 = n - n1
// with p the population mean, sigma_R = sqrt(f(1-f)), sigma_Y = sqrt(p(1-p)),
// and round half-to-even. n1 ones and n0 zeros are then drawn uniformly
// within their strata, which pins the realized correlation to within
// 1/(N * sigma_R * sigma_Y) of the target on every draw.
class Sampler {
  public:
    Sampler(const Population& pop, SamplerSpec spec);

    SampleMembership draw() const { return draw(spec_.seed); }
    SampleMembership draw(std::uint64_t seed) const;

    const SamplerSpec& spec() const { return spec_; }
    std::size_t ones_quota() const { return n_ones_; } // targeted_rho only

  private:
    SamplerSpec spec_;
    std::size_t population_size_ = 0;
    // targeted_rho state
    std::vector<std::uint32_t> ones_idx_;
    std::vector<std::uint32_t> zeros_idx_;
    std::size_t n_ones_ = 0;
    std::size_t n_zeros_ = 0;
};

// Simple random sample of exactly n units, uniform without replacement.
SampleMembership srs(const Population& pop, std::size_t n, std::uint64_t seed);

// Fixed-size sample of a binary population engineered to realize a target
// defect correlation. Throws InputError naming the attainable range when the
// target is infeasible; DegenerateError when y is non-binary or constant.
SampleMembership targeted_rho_sample(const Population& pop, std::size_t n, double target_rho,
                                     std::uint64_t seed);

// Correlations attainable by the two-stratum design at this (pop, n).
RhoRange feasible_rho_range(const Population& pop, std::size_t n);

void to_json(nlohmann::json& j, const SamplerSpec& s);
void from_json(const nlohmann::json& j, SamplerSpec& s);

} // namespace sbd
