#include "sampledefect/mitigation.hpp"

#include <algorithm>
#include <cmath>

#include "sampledefect/numeric.hpp"

namespace sbd {

namespace {

double logistic(double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// Solve A x = b for a small SPD matrix via Cholesky; A is dim x dim row-major
// and is overwritten with its factor.
std::vector<double> cholesky_solve(std::vector<double>& a, std::vector<double> b,
                                   std::size_t dim) {
    for (std::size_t j = 0; j < dim; ++j) {
        double d = a[j * dim + j];
        for (std::size_t k = 0; k < j; ++k) d -= a[j * dim + k] * a[j * dim + k];
        if (d <= 0) throw DegenerateError("propensity normal equations not positive definite");
        const double l = std::sqrt(d);
        a[j * dim + j] = l;
        for (std::size_t i = j + 1; i < dim; ++i) {
            double s = a[i * dim + j];
            for (std::size_t k = 0; k < j; ++k) s -= a[i * dim + k] * a[j * dim + k];
            a[i * dim + j] = s / l;
        }
    }
    for (std::size_t i = 0; i < dim; ++i) { // L y = b
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= a[i * dim + k] * b[k];
        b[i] = s / a[i * dim + i];
    }
    for (std::size_t ii = dim; ii-- > 0;) { // L^T x = y
        double s = b[ii];
        for (std::size_t k = ii + 1; k < dim; ++k) s -= a[k * dim + ii] * b[k];
        b[ii] = s / a[ii * dim + ii];
    }
    return b;
}

double eta_of(const Population& pop, std::span<const double> beta, std::size_t i) {
    double eta = beta[0];
    const auto row = pop.covariate_row(i);
    for (std::size_t j = 0; j < row.size(); ++j) eta += beta[j + 1] * row[j];
    return eta;
}

// penalized log-likelihood (ridge on non-intercept terms only)
double penalized_ll(const Population& pop, const SampleMembership& m,
                    std::span<const double> beta, double ridge) {
    KahanSum ll;
    for (std::size_t i = 0; i < pop.size(); ++i) {
        const double eta = eta_of(pop, beta, i);
        // log(1 + e^eta) without overflow
        const double log1pe = eta > 0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta));
        ll.add((m[i] ? eta : 0.0) - log1pe);
    }
    double pen = 0;
    for (std::size_t j = 1; j < beta.size(); ++j) pen += beta[j] * beta[j];
    return ll.value() - 0.5 * ridge * pen;
}

} // namespace

PropensityModel fit_propensity(const Population& pop, const SampleMembership& m, double ridge,
                               double tol, std::size_t max_iter) {
    if (m.size() != pop.size()) throw InputError("membership length does not match population");
    const std::size_t n = m.count();
    const std::size_t N = pop.size();
    if (n == 0 || n == N) {
        throw DegenerateError("propensity model undefined: no sampling variation");
    }
    if (ridge < 0) throw InputError("ridge must be non-negative");

    const std::size_t dim = pop.covariate_dim() + 1;
    std::vector<double> beta(dim, 0.0);
    beta[0] = std::log(static_cast<double>(n) / static_cast<double>(N - n)); // calibrated start

    PropensityModel model;
    model.ridge = ridge;
    double ll = penalized_ll(pop, m, beta, ridge);

    for (std::size_t iter = 1; iter <= max_iter; ++iter) {
        // gradient and expected information at beta
        std::vector<double> grad(dim, 0.0);
        std::vector<double> info(dim * dim, 0.0);
        std::vector<KahanSum> gsum(dim);
        for (std::size_t i = 0; i < N; ++i) {
            const double mu = logistic(eta_of(pop, beta, i));
            const double resid = (m[i] ? 1.0 : 0.0) - mu;
            const double w = mu * (1.0 - mu);
            const auto row = pop.covariate_row(i);
            gsum[0].add(resid);
            info[0] += w;
            for (std::size_t a = 0; a < row.size(); ++a) {
                gsum[a + 1].add(resid * row[a]);
                info[(a + 1) * dim] += w * row[a];
                for (std::size_t b = 0; b <= a; ++b) {
                    info[(a + 1) * dim + (b + 1)] += w * row[a] * row[b];
                }
            }
        }
        for (std::size_t j = 0; j < dim; ++j) grad[j] = gsum[j].value();
        for (std::size_t j = 1; j < dim; ++j) {
            grad[j] -= ridge * beta[j];
            info[j * dim + j] += ridge;
        }
        for (std::size_t a = 0; a < dim; ++a) { // mirror the lower triangle
            for (std::size_t b = a + 1; b < dim; ++b) info[a * dim + b] = info[b * dim + a];
        }

        double gmax = 0;
        for (double g : grad) gmax = std::max(gmax, std::abs(g) / static_cast<double>(N));
        model.iterations = iter - 1;
        if (gmax <= tol) {
            model.converged = true;
            model.coefficients = beta;
            return model;
        }

        auto step = cholesky_solve(info, grad, dim);
        // step-halving keeps the penalized likelihood non-decreasing
        double scale = 1.0;
        for (int h = 0; h < 60; ++h) {
            std::vector<double> cand(dim);
            for (std::size_t j = 0; j < dim; ++j) cand[j] = beta[j] + scale * step[j];
            const double cand_ll = penalized_ll(pop, m, cand, ridge);
            if (cand_ll >= ll - 1e-12 * std::abs(ll)) {
                beta = std::move(cand);
                ll = cand_ll;
                break;
            }
            scale *= 0.5;
        }
        model.iterations = iter;
    }

    model.converged = false;
    model.coefficients = beta;
    return model;
}

std::vector<double> predict_propensities(const PropensityModel& model, const Population& pop) {
    if (model.coefficients.size() != pop.covariate_dim() + 1) {
        throw InputError("model dimension does not match population covariates");
    }
    std::vector<double> probs(pop.size());
    for (std::size_t i = 0; i < pop.size(); ++i) {
        probs[i] = logistic(eta_of(pop, model.coefficients, i));
    }
    return probs;
}

WeightSet weights_from_propensities(std::span<const double> probs, Normalization normalization,
                                    std::optional<double> cap) {
    if (probs.empty()) throw InputError("no propensities supplied");
    if (cap && *cap <= 0) throw InputError("weight cap must be positive");
    WeightSet ws;
    ws.normalization = normalization;
    ws.weights.reserve(probs.size());
    for (double p : probs) {
        if (!(p > 0.0) || p > 1.0) {
            throw InputError("inclusion probability " + format_double(p) + " outside (0, 1]");
        }
        double w = 1.0 / p;
        if (cap) w = std::min(w, *cap);
        ws.weights.push_back(w);
    }
    if (normalization == Normalization::hajek) {
        const double mean = mean_of(ws.weights);
        for (double& w : ws.weights) w /= mean;
    }
    return ws;
}

double weighted_mean(std::span<const double> y, const WeightSet& w) {
    if (y.size() != w.weights.size()) throw InputError("weight/value length mismatch");
    KahanSum num, den;
    for (std::size_t i = 0; i < y.size(); ++i) {
        num.add(w.weights[i] * y[i]);
        den.add(w.weights[i]);
    }
    if (!(den.value() > 0)) throw InputError("weights sum to zero");
    return num.value() / den.value();
}

MitigationReport evaluate_mitigation(const Population& pop, const SampleMembership& m,
                                     const PropensityModel& model) {
    const auto probs_all = predict_propensities(model, pop);
    const auto idx = m.indices();
    if (idx.empty()) throw DegenerateError("empty sample: nothing to reweight");

    std::vector<double> sample_probs(idx.size()), sample_y(idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) {
        sample_probs[k] = probs_all[idx[k]];
        sample_y[k] = pop.y()[idx[k]];
    }
    const auto ws = weights_from_propensities(sample_probs, Normalization::hajek);

    MitigationReport rep;
    rep.model = model;
    rep.unweighted_estimate = sample_stats(pop, m).mean;
    rep.weighted_estimate = weighted_mean(sample_y, ws);
    rep.true_mean = population_stats(pop).mean;

    const double eu = std::abs(rep.unweighted_estimate - *rep.true_mean);
    const double ew = std::abs(rep.weighted_estimate - *rep.true_mean);
    if (eu > 0) {
        rep.bias_reduction_pct = 100.0 * (1.0 - ew / eu);
    } else if (ew == 0) {
        rep.bias_reduction_pct = 0.0;
    } // an exactly unbiased raw sample made worse has no meaningful percentage

    WeightsSummary sum;
    sum.min = *std::min_element(ws.weights.begin(), ws.weights.end());
    sum.max = *std::max_element(ws.weights.begin(), ws.weights.end());
    const double wmean = mean_of(ws.weights);
    KahanSum ss;
    for (double w : ws.weights) {
        const double d = w - wmean;
        ss.add(d * d);
    }
    sum.cv = std::sqrt(std::max(ss.value(), 0.0) / static_cast<double>(ws.weights.size())) / wmean;
    rep.weights_summary = sum;
    return rep;
}

void to_json(nlohmann::json& j, const PropensityModel& m) {
    j = nlohmann::json{{"coefficients", m.coefficients},
                       {"converged", m.converged},
                       {"iterations", m.iterations},
                       {"ridge", m.ridge}};
}

void from_json(const nlohmann::json& j, PropensityModel& m) {
    j.at("coefficients").get_to(m.coefficients);
    j.at("converged").get_to(m.converged);
    j.at("iterations").get_to(m.iterations);
    j.at("ridge").get_to(m.ridge);
}

void to_json(nlohmann::json& j, const MitigationReport& r) {
    j = nlohmann::json{{"unweighted_estimate", r.unweighted_estimate},
                       {"weighted_estimate", r.weighted_estimate},
                       {"weights_summary",
                        {{"min", r.weights_summary.min},
                         {"max", r.weights_summary.max},
                         {"cv", r.weights_summary.cv}}},
                       {"model", r.model}};
    if (r.true_mean) j["true_mean"] = *r.true_mean;
    if (r.bias_reduction_pct) j["bias_reduction_pct"] = *r.bias_reduction_pct;
}

} // namespace sbd
