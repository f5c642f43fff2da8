#include "sampledefect/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "sampledefect/numeric.hpp"
#include "sampledefect/rng.hpp"

namespace sbd {

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw InputError("normal quantile requires p in (0, 1)");
    // Wichura (1988), algorithm AS 241, PPND16.
    const double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                     6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                   1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
                 1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
               (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                     3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
                   5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
                 4.2313330701600911252e1) * r + 1.0);
    }
    double r = (q < 0.0) ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double z;
    if (r <= 5.0) {
        r -= 1.6;
        z = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
              4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
              2.05319162663775882187e0) * r + 1.0);
    } else {
        r -= 5.0;
        z = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
              5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r + 1.0);
    }
    return (q < 0.0) ? -z : z;
}

Interval normal_ci(double estimate, double sd_est, std::size_t n, double level) {
    if (n < 2) throw InputError("normal interval requires n >= 2");
    if (sd_est < 0) throw InputError("negative standard deviation");
    if (!(level > 0.0 && level < 1.0)) throw InputError("confidence level outside (0, 1)");
    const double z = normal_quantile(0.5 + level / 2.0);
    const double half = z * sd_est / std::sqrt(static_cast<double>(n));
    return Interval{estimate - half, estimate + half};
}

namespace {

std::vector<HistogramBin> bin_values(std::span<const double> values, std::size_t bins) {
    std::vector<HistogramBin> out;
    if (values.empty() || bins == 0) return out;
    double lo = values[0], hi = values[0];
    for (double v : values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (lo == hi) {
        // point mass: a single zero-width bin keeps counts meaningful
        out.push_back(HistogramBin{lo, hi, values.size()});
        return out;
    }
    out.resize(bins);
    const double width = (hi - lo) / static_cast<double>(bins);
    for (std::size_t b = 0; b < bins; ++b) {
        out[b].lo = lo + width * static_cast<double>(b);
        out[b].hi = (b + 1 == bins) ? hi : lo + width * static_cast<double>(b + 1);
    }
    for (double v : values) {
        auto b = static_cast<std::size_t>((v - lo) / width);
        if (b >= bins) b = bins - 1; // hi lands in the last (closed) bin
        ++out[b].count;
    }
    return out;
}

SeriesSummary summarize(std::span<const double> values, std::size_t bins) {
    SeriesSummary s;
    s.count = values.size();
    if (s.count == 0) return s;
    s.mean = mean_of(values);
    if (s.count >= 2) {
        KahanSum ss;
        for (double v : values) {
            const double d = v - s.mean;
            ss.add(d * d);
        }
        s.sd = std::sqrt(std::max(ss.value(), 0.0) / static_cast<double>(s.count - 1));
    }
    s.bins = bin_values(values, bins);
    return s;
}

double sample_sd_unbiased(const Population& pop, const SampleMembership& m, double mean) {
    KahanSum ss;
    const auto ys = pop.y();
    for (std::size_t i = 0; i < ys.size(); ++i) {
        if (m[i]) {
            const double d = ys[i] - mean;
            ss.add(d * d);
        }
    }
    return std::sqrt(std::max(ss.value(), 0.0) / static_cast<double>(m.count() - 1));
}

} // namespace

CoverageResult run_experiment(const Population& pop, const ExperimentConfig& cfg) {
    if (cfg.replicates == 0) throw InputError("experiment needs at least one replicate");
    if (!(cfg.ci_level > 0.0 && cfg.ci_level < 1.0)) {
        throw InputError("confidence level outside (0, 1)");
    }
    if (cfg.sampler.n < 2) throw InputError("experiment sample size must be at least 2");
    const Sampler sampler(pop, cfg.sampler);
    const double truth = population_stats(pop).mean;

    CoverageResult res;
    res.replicates = cfg.replicates;
    res.true_mean = truth;
    res.ci_level = cfg.ci_level;
    res.sampler = cfg.sampler;
    res.estimate_values.resize(cfg.replicates);
    res.squared_error_values.resize(cfg.replicates);

    std::size_t covered = 0;
    for (std::size_t r = 0; r < cfg.replicates; ++r) {
        const auto membership = sampler.draw(derive_seed(cfg.master_seed, r));
        const auto stats = sample_stats(pop, membership);
        const double sd = sample_sd_unbiased(pop, membership, stats.mean);
        const auto ci = normal_ci(stats.mean, sd, stats.n, cfg.ci_level);
        if (ci.lo <= truth && truth <= ci.hi) ++covered;
        res.estimate_values[r] = stats.mean;
        const double err = stats.mean - truth;
        res.squared_error_values[r] = err * err;
    }

    res.covered = covered;
    res.coverage = static_cast<double>(covered) / static_cast<double>(cfg.replicates);
    res.mse = mean_of(res.squared_error_values);
    res.mean_estimate = mean_of(res.estimate_values);
    res.estimates = summarize(res.estimate_values, cfg.histogram_bins);
    res.squared_errors = summarize(res.squared_error_values, cfg.histogram_bins);
    return res;
}

MseParity mse_parity(const Population& pop, const ExperimentConfig& small_srs,
                     const ExperimentConfig& biased) {
    if (small_srs.sampler.kind != SamplerKind::srs) {
        throw InputError("mse_parity: first design must be srs");
    }
    const auto a = run_experiment(pop, small_srs);
    const auto b = run_experiment(pop, biased);
    return MseParity{a.mse, b.mse, b.mse / a.mse};
}

namespace {

void write_histogram_rows(std::ofstream& out, const char* series,
                          const std::vector<HistogramBin>& bins) {
    for (const auto& b : bins) {
        out << series << ',' << format_double(b.lo) << ',' << format_double(b.hi) << ','
            << b.count << '\n';
    }
}

} // namespace

void export_distributions(const CoverageResult& result, const std::filesystem::path& dir) {
    if (result.estimate_values.empty()) throw InputError("export of an empty result");
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / "replicates.csv", std::ios::binary);
        if (!out) throw InputError("cannot write " + (dir / "replicates.csv").string());
        out << "replicate,estimate,squared_error\n";
        for (std::size_t r = 0; r < result.estimate_values.size(); ++r) {
            out << r << ',' << format_double(result.estimate_values[r]) << ','
                << format_double(result.squared_error_values[r]) << '\n';
        }
        if (!out) throw InputError("write failed: replicates.csv");
    }
    {
        std::ofstream out(dir / "histogram.csv", std::ios::binary);
        if (!out) throw InputError("cannot write " + (dir / "histogram.csv").string());
        out << "series,bin_lo,bin_hi,count\n";
        write_histogram_rows(out, "estimate", result.estimates.bins);
        write_histogram_rows(out, "squared_error", result.squared_errors.bins);
        if (!out) throw InputError("write failed: histogram.csv");
    }
}

namespace {

nlohmann::json summary_json(const SeriesSummary& s) {
    nlohmann::json bins = nlohmann::json::array();
    for (const auto& b : s.bins) {
        bins.push_back({{"lo", b.lo}, {"hi", b.hi}, {"count", b.count}});
    }
    return {{"count", s.count}, {"mean", s.mean}, {"sd", s.sd}, {"histogram", std::move(bins)}};
}

} // namespace

void to_json(nlohmann::json& j, const CoverageResult& r) {
    j = nlohmann::json{{"replicates", r.replicates},
                       {"covered", r.covered},
                       {"coverage", r.coverage},
                       {"mse", r.mse},
                       {"mean_estimate", r.mean_estimate},
                       {"true_mean", r.true_mean},
                       {"ci_level", r.ci_level},
                       {"sampler", r.sampler},
                       {"estimates", summary_json(r.estimates)},
                       {"squared_errors", summary_json(r.squared_errors)}};
}

void to_json(nlohmann::json& j, const ExperimentConfig& c) {
    j = nlohmann::json{{"sampler", c.sampler},
                       {"replicates", c.replicates},
                       {"ci_level", c.ci_level},
                       {"master_seed", c.master_seed},
                       {"histogram_bins", c.histogram_bins}};
}

void from_json(const nlohmann::json& j, ExperimentConfig& c) {
    j.at("sampler").get_to(c.sampler);
    j.at("replicates").get_to(c.replicates);
    j.at("ci_level").get_to(c.ci_level);
    j.at("master_seed").get_to(c.master_seed);
    c.histogram_bins = j.value("histogram_bins", std::size_t{40});
}

} // namespace sbd
