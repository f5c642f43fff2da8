#include "sampledefect/sampler.hpp"

#include <cassert>
#include <cmath>

#include "sampledefect/numeric.hpp"
#include "sampledefect/rng.hpp"

namespace sbd {

namespace {

struct BinaryStrata {
    std::vector<std::uint32_t> ones;
    std::vector<std::uint32_t> zeros;
};

BinaryStrata split_strata(const Population& pop) {
    BinaryStrata s;
    const auto ys = pop.y();
    for (std::size_t i = 0; i < ys.size(); ++i) {
        if (ys[i] == 1.0) {
            s.ones.push_back(static_cast<std::uint32_t>(i));
        } else if (ys[i] == 0.0) {
            s.zeros.push_back(static_cast<std::uint32_t>(i));
        } else {
            throw DegenerateError("targeted sampling requires binary y (unit " + pop.ids()[i] +
                                  " has y = " + format_double(ys[i]) + ")");
        }
    }
    return s;
}

double rho_of_allocation(double n1, std::size_t n, std::size_t N, double p) {
    const double f = static_cast<double>(n) / static_cast<double>(N);
    const double sigma_r = std::sqrt(f * (1.0 - f));
    const double sigma_y = std::sqrt(p * (1.0 - p));
    return (n1 / static_cast<double>(N) - f * p) / (sigma_r * sigma_y);
}

// round half to even, as std::nearbyint under the default rounding mode
long long round_half_even(double x) {
    return static_cast<long long>(std::nearbyint(x));
}

} // namespace

Sampler::Sampler(const Population& pop, SamplerSpec spec)
    : spec_(spec), population_size_(pop.size()) {
    const std::size_t N = pop.size();
    if (spec_.n < 1 || spec_.n > N) {
        throw InputError("sample size " + std::to_string(spec_.n) + " outside [1, N=" +
                         std::to_string(N) + "]");
    }
    if (spec_.kind == SamplerKind::srs) return;

    // targeted_rho: resolve the allocation once
    if (spec_.n == N) throw InputError("targeted sampling requires n < N");
    if (std::abs(spec_.target_rho) > 1.0) throw InputError("target correlation outside [-1, 1]");
    auto strata = split_strata(pop);
    const std::size_t N1 = strata.ones.size();
    if (N1 == 0 || N1 == N) {
        throw DegenerateError("targeted sampling undefined: constant study variable");
    }
    const double p = static_cast<double>(N1) / static_cast<double>(N);
    const double f = static_cast<double>(spec_.n) / static_cast<double>(N);
    const double sigma_r = std::sqrt(f * (1.0 - f));
    const double sigma_y = std::sqrt(p * (1.0 - p));
    const long long n1 = round_half_even(
        static_cast<double>(N) * (f * p + spec_.target_rho * sigma_r * sigma_y));

    const long long n1_min =
        std::max<long long>(0, static_cast<long long>(spec_.n) -
                                   static_cast<long long>(strata.zeros.size()));
    const long long n1_max =
        std::min<long long>(static_cast<long long>(spec_.n), static_cast<long long>(N1));
    if (n1 < n1_min || n1 > n1_max) {
        const double lo = rho_of_allocation(static_cast<double>(n1_min), spec_.n, N, p);
        const double hi = rho_of_allocation(static_cast<double>(n1_max), spec_.n, N, p);
        throw InputError("target correlation " + format_double(spec_.target_rho) +
                         " infeasible at n = " + std::to_string(spec_.n) +
                         "; attainable range is [" + format_double(lo) + ", " +
                         format_double(hi) + "]");
    }

    // per-draw rounding bound promised by the design
    const double realized = rho_of_allocation(static_cast<double>(n1), spec_.n, N, p);
    const double bound = 1.0 / (static_cast<double>(N) * sigma_r * sigma_y);
    assert(std::abs(realized - spec_.target_rho) <= bound);
    (void)realized;
    (void)bound;

    ones_idx_ = std::move(strata.ones);
    zeros_idx_ = std::move(strata.zeros);
    n_ones_ = static_cast<std::size_t>(n1);
    n_zeros_ = spec_.n - n_ones_;
}

SampleMembership Sampler::draw(std::uint64_t seed) const {
    SplitMix64 rng(seed);
    if (spec_.kind == SamplerKind::srs) {
        const auto idx = sample_indices(static_cast<std::uint32_t>(population_size_),
                                        static_cast<std::uint32_t>(spec_.n), rng);
        return SampleMembership::from_indices(population_size_, idx);
    }
    std::vector<std::uint8_t> flags(population_size_, 0);
    SplitMix64 ones_rng(rng.next());
    SplitMix64 zeros_rng(rng.next());
    for (auto i : sample_indices(static_cast<std::uint32_t>(ones_idx_.size()),
                                 static_cast<std::uint32_t>(n_ones_), ones_rng)) {
        flags[ones_idx_[i]] = 1;
    }
    for (auto i : sample_indices(static_cast<std::uint32_t>(zeros_idx_.size()),
                                 static_cast<std::uint32_t>(n_zeros_), zeros_rng)) {
        flags[zeros_idx_[i]] = 1;
    }
    return SampleMembership(std::move(flags));
}

SampleMembership srs(const Population& pop, std::size_t n, std::uint64_t seed) {
    return Sampler(pop, SamplerSpec{SamplerKind::srs, n, 0.0, seed}).draw(seed);
}

SampleMembership targeted_rho_sample(const Population& pop, std::size_t n, double target_rho,
                                     std::uint64_t seed) {
    return Sampler(pop, SamplerSpec{SamplerKind::targeted_rho, n, target_rho, seed}).draw(seed);
}

RhoRange feasible_rho_range(const Population& pop, std::size_t n) {
    const std::size_t N = pop.size();
    if (n < 1 || n >= N) throw InputError("feasible range requires 0 < n < N");
    const auto strata = split_strata(pop);
    const std::size_t N1 = strata.ones.size();
    if (N1 == 0 || N1 == N) {
        throw DegenerateError("feasible range undefined: constant study variable");
    }
    const double p = static_cast<double>(N1) / static_cast<double>(N);
    const long long n1_min = std::max<long long>(
        0, static_cast<long long>(n) - static_cast<long long>(strata.zeros.size()));
    const long long n1_max = std::min<long long>(static_cast<long long>(n),
                                                 static_cast<long long>(N1));
    return RhoRange{rho_of_allocation(static_cast<double>(n1_min), n, N, p),
                    rho_of_allocation(static_cast<double>(n1_max), n, N, p)};
}

void to_json(nlohmann::json& j, const SamplerSpec& s) {
    j = nlohmann::json{{"kind", s.kind == SamplerKind::srs ? "srs" : "targeted_rho"},
                       {"n", s.n},
                       {"seed", s.seed}};
    if (s.kind == SamplerKind::targeted_rho) j["target_rho"] = s.target_rho;
}

void from_json(const nlohmann::json& j, SamplerSpec& s) {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "srs") {
        s.kind = SamplerKind::srs;
    } else if (kind == "targeted_rho") {
        s.kind = SamplerKind::targeted_rho;
    } else {
        throw InputError("unknown sampler kind \"" + kind + "\"");
    }
    j.at("n").get_to(s.n);
    s.target_rho = 0;
    if (s.kind == SamplerKind::targeted_rho) j.at("target_rho").get_to(s.target_rho);
    s.seed = j.value("seed", std::uint64_t{0});
}

} // namespace sbd
