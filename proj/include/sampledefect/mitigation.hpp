#pragma once

#include <optional>
#include <span>
#include <vector>

#include "json.hpp"

#include "sampledefect/population.hpp"

namespace sbd {

// Logistic inclusion-propensity model fit on the full population frame
// (quasi-randomization needs covariates for non-sampled units too).
struct PropensityModel {
    std::vector<double> coefficients; // intercept first, then one per covariate
    bool converged = false;
    std::size_t iterations = 0;
    double ridge = 0;
};

// Iteratively reweighted least squares with a ridge penalty on the
// non-intercept terms. Convergence is max-norm of the per-unit mean penalized
// gradient <= tol; non-convergence is reported via the flag, not thrown.
PropensityModel fit_propensity(const Population& pop, const SampleMembership& m,
                               double ridge = 1e-6, double tol = 1e-8,
                               std::size_t max_iter = 100);

// Fitted inclusion probabilities for every unit of the frame, each in (0,1).
std::vector<double> predict_propensities(const PropensityModel& model, const Population& pop);

enum class Normalization { hajek, horvitz_thompson };

struct WeightSet {
    std::vector<double> weights; // over sampled units, all positive and finite
    Normalization normalization = Normalization::hajek;
};

// w_i = 1/prob_i, optionally truncated at `cap`, then normalized to mean 1
// over the sample for the Hajek mode. Probabilities must lie in (0, 1].
WeightSet weights_from_propensities(std::span<const double> probs, Normalization normalization,
                                    std::optional<double> cap = std::nullopt);

// sum(w*y) / sum(w). With unnormalized inverse-probability weights the
// Horvitz-Thompson total is sum(w*y).
double weighted_mean(std::span<const double> y, const WeightSet& w);

struct WeightsSummary {
    double min = 0;
    double max = 0;
    double cv = 0; // coefficient of variation (sd/mean, divide-by-n)
};

struct MitigationReport {
    double unweighted_estimate = 0;
    double weighted_estimate = 0;
    std::optional<double> true_mean;
    std::optional<double> bias_reduction_pct; // set when true_mean is known
    WeightsSummary weights_summary;
    PropensityModel model;

    double unweighted_error() const { return unweighted_estimate - true_mean.value(); }
    double weighted_error() const { return weighted_estimate - true_mean.value(); }
};

// Hajek-weighted re-estimate of the population mean from the fitted model,
// with the achieved bias reduction made explicit (truth is known here: the
// full frame carries y).
MitigationReport evaluate_mitigation(const Population& pop, const SampleMembership& m,
                                     const PropensityModel& model);

void to_json(nlohmann::json& j, const PropensityModel& m);
void from_json(const nlohmann::json& j, PropensityModel& m);
void to_json(nlohmann::json& j, const MitigationReport& r);

} // namespace sbd
