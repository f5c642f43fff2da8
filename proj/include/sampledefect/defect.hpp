#pragma once

#include <cstddef>

#include "json.hpp"

#include "sampledefect/population.hpp"

namespace sbd {

// The three-factor decomposition of the estimation error
//   sample_mean - population_mean = rho * sqrt((1-f)/f) * sigma_y
// which holds exactly for any membership with 0 < n < N.
struct ErrorDecomposition {
    double rho = 0;            // correlation between inclusion and the study variable
    double f = 0;              // sampling rate n/N
    double sigma_y = 0;        // population sd (divide-by-N)
    double dropout_factor = 0; // sqrt((1-f)/f)
    double actual_error = 0;   // sample mean - population mean
};

struct EffectiveSampleSize {
    double n_eff = 0;
    bool clamped = false; // true when the formula exceeded N (a census is the ceiling)
};

struct DefectDiagnostics {
    double rho = 0;
    double f = 0;
    double sigma_y = 0;
    double dropout_factor = 0;
    double actual_error = 0;
    double n_eff = 0;
    bool n_eff_clamped = false;
    double required_z = 0;          // computed against the integer n_eff view
    double relative_reduction = 0;  // 1 - n_eff/n, on the real-valued n_eff
    std::size_t sample_size = 0;
    std::size_t population_size = 0;

    long n_eff_ceil() const; // the headline integer view of n_eff
};

// Pearson correlation over all N units between the inclusion indicator and y.
// Throws DegenerateError when n is 0 or N, or when sigma_y is 0.
double defect_correlation(const Population& pop, const SampleMembership& m);

ErrorDecomposition error_decomposition(const Population& pop, const SampleMembership& m);

// n_eff = (f/(1-f)) / rho^2 with f = n/N, clamped to N when the formula
// exceeds it (including rho = 0 and f = 1).
EffectiveSampleSize effective_sample_size(double rho, std::size_t n, std::size_t population_size);

double required_z(std::size_t n, double n_eff);

double relative_reduction(std::size_t n, double n_eff);

DefectDiagnostics diagnose(const Population& pop, const SampleMembership& m);

void to_json(nlohmann::json& j, const DefectDiagnostics& d);
void from_json(const nlohmann::json& j, DefectDiagnostics& d);

} // namespace sbd
