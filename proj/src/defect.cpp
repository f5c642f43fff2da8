#include "sampledefect/defect.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "sampledefect/numeric.hpp"

namespace sbd {

namespace {

struct Moments {
    std::size_t n = 0;
    std::size_t population_size = 0;
    double f = 0;
    double pop_mean = 0;
    double sigma_y = 0;
    double sample_mean = 0;
};

Moments check_and_measure(const Population& pop, const SampleMembership& m) {
    if (m.size() != pop.size()) throw InputError("membership length does not match population");
    const std::size_t n = m.count();
    const std::size_t N = pop.size();
    if (n == 0 || n == N) {
        throw DegenerateError("correlation undefined: no sampling variation (n = " +
                              std::to_string(n) + " of N = " + std::to_string(N) + ")");
    }
    const auto ps = population_stats(pop);
    if (ps.sd == 0) {
        throw DegenerateError("correlation undefined: constant study variable");
    }
    const auto ss = sample_stats(pop, m);
    return Moments{n, N, static_cast<double>(n) / static_cast<double>(N),
                   ps.mean, ps.sd, ss.mean};
}

// For an indicator R with mean f, cov(R,Y) = (1/N) sum R_i Y_i - f*mean(Y)
// = f*(sample_mean - pop_mean) exactly; the Pearson correlation follows by
// dividing by sigma_R * sigma_Y.
double rho_from(const Moments& mo) {
    const double sigma_r = std::sqrt(mo.f * (1.0 - mo.f));
    const double rho = mo.f * (mo.sample_mean - mo.pop_mean) / (sigma_r * mo.sigma_y);
    assert(rho >= -1.0 - 1e-9 && rho <= 1.0 + 1e-9);
    return std::clamp(rho, -1.0, 1.0);
}

} // namespace

double defect_correlation(const Population& pop, const SampleMembership& m) {
    return rho_from(check_and_measure(pop, m));
}

ErrorDecomposition error_decomposition(const Population& pop, const SampleMembership& m) {
    const auto mo = check_and_measure(pop, m);
    ErrorDecomposition d;
    d.rho = rho_from(mo);
    d.f = mo.f;
    d.sigma_y = mo.sigma_y;
    d.dropout_factor = std::sqrt((1.0 - mo.f) / mo.f);
    d.actual_error = mo.sample_mean - mo.pop_mean;
    return d;
}

EffectiveSampleSize effective_sample_size(double rho, std::size_t n, std::size_t population_size) {
    if (n == 0) throw InputError("empty sample");
    if (n > population_size) throw InputError("sample size exceeds population size");
    if (std::abs(rho) > 1.0) throw InputError("correlation outside [-1, 1]");
    const double N = static_cast<double>(population_size);
    const double f = static_cast<double>(n) / N;
    if (rho == 0.0 || f >= 1.0) return EffectiveSampleSize{N, true};
    const double raw = (f / (1.0 - f)) / (rho * rho);
    if (raw >= N) return EffectiveSampleSize{N, true};
    return EffectiveSampleSize{raw, false};
}

double required_z(std::size_t n, double n_eff) {
    if (n == 0) throw InputError("empty sample");
    if (!(n_eff > 0)) throw InputError("n_eff must be positive");
    return std::sqrt(static_cast<double>(n) / n_eff);
}

double relative_reduction(std::size_t n, double n_eff) {
    if (n == 0) throw InputError("empty sample");
    if (!(n_eff > 0)) throw InputError("n_eff must be positive");
    if (n_eff > static_cast<double>(n)) {
        throw InputError("n_eff exceeds n: effective size was clamped against the wrong baseline");
    }
    return 1.0 - n_eff / static_cast<double>(n);
}

long DefectDiagnostics::n_eff_ceil() const {
    return static_cast<long>(std::ceil(n_eff));
}

DefectDiagnostics diagnose(const Population& pop, const SampleMembership& m) {
    const auto mo = check_and_measure(pop, m);
    DefectDiagnostics d;
    d.rho = rho_from(mo);
    d.f = mo.f;
    d.sigma_y = mo.sigma_y;
    d.dropout_factor = std::sqrt((1.0 - mo.f) / mo.f);
    d.actual_error = mo.sample_mean - mo.pop_mean;
    d.sample_size = mo.n;
    d.population_size = mo.population_size;
    const auto eff = effective_sample_size(d.rho, mo.n, mo.population_size);
    d.n_eff = eff.n_eff;
    d.n_eff_clamped = eff.clamped;
    if (d.n_eff <= static_cast<double>(mo.n)) {
        // The z needed for coverage is conventionally quoted against the
        // integer effective size (27.4 reads as "an SRS of 28").
        d.required_z = required_z(mo.n, static_cast<double>(d.n_eff_ceil()));
        d.relative_reduction = relative_reduction(mo.n, d.n_eff);
    } else {
        // A sample whose realized defect is below SRS parity loses nothing:
        // the nominal interval already suffices.
        d.required_z = 1.0;
        d.relative_reduction = 0.0;
    }
    return d;
}

void to_json(nlohmann::json& j, const DefectDiagnostics& d) {
    j = nlohmann::json{{"rho", d.rho},
                       {"f", d.f},
                       {"sigma_y", d.sigma_y},
                       {"actual_error", d.actual_error},
                       {"n_eff", d.n_eff},
                       {"n_eff_clamped", d.n_eff_clamped},
                       {"required_z", d.required_z},
                       {"relative_reduction", d.relative_reduction}};
}

void from_json(const nlohmann::json& j, DefectDiagnostics& d) {
    j.at("rho").get_to(d.rho);
    j.at("f").get_to(d.f);
    j.at("sigma_y").get_to(d.sigma_y);
    j.at("actual_error").get_to(d.actual_error);
    j.at("n_eff").get_to(d.n_eff);
    j.at("n_eff_clamped").get_to(d.n_eff_clamped);
    j.at("required_z").get_to(d.required_z);
    j.at("relative_reduction").get_to(d.relative_reduction);
    d.dropout_factor = (d.f > 0 && d.f < 1) ? std::sqrt((1.0 - d.f) / d.f) : 0.0;
}

} // namespace sbd
