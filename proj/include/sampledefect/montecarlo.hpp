#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "json.hpp"

#include "sampledefect/population.hpp"
#include "sampledefect/sampler.hpp"

namespace sbd {

struct ExperimentConfig {
    SamplerSpec sampler;
    std::size_t replicates = 0;
    double ci_level = 0.95;
    std::uint64_t master_seed = 0;
    std::size_t histogram_bins = 40;
};

struct HistogramBin {
    double lo = 0;
    double hi = 0;
    std::size_t count = 0;
};

struct SeriesSummary {
    std::size_t count = 0;
    double mean = 0;
    double sd = 0; // divide-by-(count-1); 0 when count < 2
    std::vector<HistogramBin> bins;
};

struct Interval {
    double lo = 0;
    double hi = 0;
};

struct CoverageResult {
    std::size_t replicates = 0;
    std::size_t covered = 0;  // coverage is the exact integer ratio covered/replicates
    double coverage = 0;
    double mse = 0;
    double mean_estimate = 0;
    double true_mean = 0;
    double ci_level = 0;
    SamplerSpec sampler;
    SeriesSummary estimates;
    SeriesSummary squared_errors;
    std::vector<double> estimate_values;      // per replicate, in replicate order
    std::vector<double> squared_error_values; // per replicate, in replicate order
};

// Standard normal quantile (Wichura's AS 241, double precision).
double normal_quantile(double p);

// estimate +/- z * sd_est / sqrt(n), z the two-sided level quantile.
Interval normal_ci(double estimate, double sd_est, std::size_t n, double level);

// Replicated sampling experiment: per replicate, draw a membership with seed
// derive_seed(master_seed, r), take the sample mean and sd (divide-by-(n-1)),
// form the normal CI, and score coverage against the exact population mean.
// Replicates are independent given their derived seeds, so results do not
// depend on evaluation order.
CoverageResult run_experiment(const Population& pop, const ExperimentConfig& cfg);

struct MseParity {
    double mse_small_srs = 0;
    double mse_biased = 0;
    double ratio = 0; // mse_biased / mse_small_srs
};

// MSE comparison between a small SRS design and a large biased design; the
// small arm is meant to run at n = ceil(n_eff) of the biased design.
MseParity mse_parity(const Population& pop, const ExperimentConfig& small_srs,
                     const ExperimentConfig& biased);

// Writes replicates.csv (replicate,estimate,squared_error) and histogram.csv
// (series,bin_lo,bin_hi,count) into `dir`. Deterministic byte-for-byte.
void export_distributions(const CoverageResult& result, const std::filesystem::path& dir);

void to_json(nlohmann::json& j, const CoverageResult& r); // aggregates only
void to_json(nlohmann::json& j, const ExperimentConfig& c);
void from_json(const nlohmann::json& j, ExperimentConfig& c);

} // namespace sbd
