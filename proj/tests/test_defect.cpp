#include "doctest.h"

#include <cmath>

#include "sampledefect/defect.hpp"
#include "sampledefect/rng.hpp"

#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace sbd;

TEST_CASE("defect correlation: sampling both ones of (1,1,0,0) gives rho = 1") {
    const auto pop = fixtures::binary_population({1, 1, 0, 0});
    const auto rho = defect_correlation(pop, fixtures::membership_of({1, 1, 0, 0}));
    CHECK(rho == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("defect correlation: degenerate inputs raise structured errors") {
    const auto pop = fixtures::binary_population({1, 1, 0, 0});
    SUBCASE("census") {
        CHECK_THROWS_WITH_AS(defect_correlation(pop, fixtures::membership_of({1, 1, 1, 1})),
                             doctest::Contains("no sampling variation"), DegenerateError);
    }
    SUBCASE("empty sample") {
        CHECK_THROWS_AS(defect_correlation(pop, fixtures::membership_of({0, 0, 0, 0})),
                        DegenerateError);
    }
    SUBCASE("constant study variable") {
        const auto flat = fixtures::binary_population({1, 1, 1, 1});
        CHECK_THROWS_WITH_AS(defect_correlation(flat, fixtures::membership_of({1, 0, 0, 0})),
                             doctest::Contains("constant study variable"), DegenerateError);
    }
}

TEST_CASE("defect correlation: matches the direct Pearson oracle on random fixtures") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto pop = fixtures::random_population(3 + seed % 40, 1000 + seed);
        const auto m = fixtures::random_membership(pop.size(), 2000 + seed);
        if (m.count() == 0 || m.count() == pop.size()) continue;
        std::vector<double> y(pop.y().begin(), pop.y().end());
        const double expect = static_cast<double>(oracle::pearson_rho(y, m.flags()));
        CHECK(defect_correlation(pop, m) == doctest::Approx(expect).epsilon(1e-10));
    }
}

TEST_CASE("defect correlation: sign follows the sample-vs-population mean") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto pop = fixtures::random_population(20, 7000 + seed);
        const auto m = fixtures::random_membership(pop.size(), 8000 + seed);
        const auto rho = defect_correlation(pop, m);
        const auto d = sample_stats(pop, m).mean - population_stats(pop).mean;
        if (d > 0) CHECK(rho > 0);
        if (d < 0) CHECK(rho < 0);
        if (rho == 0) CHECK(d == doctest::Approx(0.0).epsilon(1e-14));
    }
}

TEST_CASE("defect correlation: affine invariance in y") {
    const auto pop = fixtures::random_population(31, 5);
    const auto m = fixtures::random_membership(31, 6);
    const double rho = defect_correlation(pop, m);
    std::vector<double> scaled, flipped;
    for (double v : pop.y()) {
        scaled.push_back(2.5 * v + 7.0);
        flipped.push_back(-0.5 * v + 1.0);
    }
    CHECK(defect_correlation(fixtures::binary_population(scaled), m) ==
          doctest::Approx(rho).epsilon(1e-12));
    CHECK(defect_correlation(fixtures::binary_population(flipped), m) ==
          doctest::Approx(-rho).epsilon(1e-12));
}

TEST_CASE("error decomposition: identity holds to 1e-12 relative on random fixtures") {
    std::size_t tested = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto pop = fixtures::random_population(2 + seed % 200, 31000 + seed);
        const auto m = fixtures::random_membership(pop.size(), 77000 + seed);
        if (m.count() == 0 || m.count() == pop.size()) continue;
        const auto d = error_decomposition(pop, m);
        const double product = d.rho * d.dropout_factor * d.sigma_y;
        CHECK(std::abs(product - d.actual_error) <=
              1e-12 * std::max(std::abs(d.actual_error), 1e-300));
        ++tested;
    }
    CHECK(tested > 150);
}

TEST_CASE("error decomposition: zero-defect membership has zero error") {
    // proportionate membership over a balanced binary population
    const auto pop = fixtures::binary_population({1, 1, 0, 0});
    const auto d = error_decomposition(pop, fixtures::membership_of({1, 0, 1, 0}));
    CHECK(d.rho == doctest::Approx(0.0));
    CHECK(d.actual_error == doctest::Approx(0.0));
}

TEST_CASE("effective sample size: formula, clamping and errors") {
    SUBCASE("the published defect yields n_eff around 27.4, ceiling 28") {
        const auto e = effective_sample_size(-0.058, 19419, 229772);
        CHECK_FALSE(e.clamped);
        CHECK(e.n_eff == doctest::Approx(27.44).epsilon(2e-3));
        DefectDiagnostics d;
        d.n_eff = e.n_eff;
        CHECK(d.n_eff_ceil() == 28);
    }
    SUBCASE("rho = 0 clamps to a census") {
        const auto e = effective_sample_size(0.0, 100, 1000);
        CHECK(e.clamped);
        CHECK(e.n_eff == 1000.0);
    }
    SUBCASE("f = 1 clamps to a census") {
        const auto e = effective_sample_size(0.5, 1000, 1000);
        CHECK(e.clamped);
        CHECK(e.n_eff == 1000.0);
    }
    SUBCASE("tiny rho that would exceed N clamps") {
        const auto e = effective_sample_size(1e-9, 500, 1000);
        CHECK(e.clamped);
        CHECK(e.n_eff == 1000.0);
    }
    SUBCASE("n = 0 is an error") {
        CHECK_THROWS_AS(effective_sample_size(0.1, 0, 10), InputError);
    }
    SUBCASE("election-poll scale: N reconstructed so that n_eff lands near 400") {
        // 2.3M responses against a 231,557,000-strong electorate
        const auto e = effective_sample_size(-0.005, 2300000, 231557000);
        CHECK(e.n_eff == doctest::Approx(401.296).epsilon(1e-4));
    }
}

TEST_CASE("effective sample size: strictly decreasing in |rho|") {
    double prev = 1e300;
    for (double rho = 0.01; rho <= 1.0; rho += 0.01) {
        const auto e = effective_sample_size(-rho, 250000, 250000000);
        CHECK(e.n_eff < prev);
        prev = e.n_eff;
    }
}

TEST_CASE("required z") {
    CHECK(required_z(19419, 28.0) == doctest::Approx(26.34).epsilon(1e-3));
    CHECK(required_z(400, 400.0) == 1.0);
    CHECK(required_z(400, 100.0) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("relative reduction") {
    CHECK(relative_reduction(19419, 28.0) == doctest::Approx(0.99856).epsilon(1e-4));
    CHECK(relative_reduction(2300000, 400.0) == doctest::Approx(0.99983).epsilon(1e-4));
    CHECK(relative_reduction(400, 400.0) == 0.0);
    CHECK_THROWS_AS(relative_reduction(100, 101.0), InputError);
}

TEST_CASE("diagnose: tiny fixtures match the exhaustive oracle") {
    // every membership of every size over several N <= 12 populations
    for (std::size_t n_pop = 2; n_pop <= 9; ++n_pop) {
        for (std::uint64_t variant = 0; variant < 3; ++variant) {
            const auto pop = fixtures::random_population(n_pop, 500 * n_pop + variant);
            std::vector<double> y(pop.y().begin(), pop.y().end());
            for (std::size_t n = 1; n < n_pop; ++n) {
                oracle::for_each_membership(n_pop, n, [&](const std::vector<std::uint8_t>& fl) {
                    const SampleMembership m{fl};
                    const auto d = diagnose(pop, m);
                    const double rho_oracle = static_cast<double>(oracle::pearson_rho(y, fl));
                    CHECK(d.rho == doctest::Approx(rho_oracle).epsilon(1e-9));
                    const double neff_oracle = static_cast<double>(
                        oracle::effective_sample_size(oracle::pearson_rho(y, fl), n, n_pop));
                    CHECK(d.n_eff == doctest::Approx(neff_oracle).epsilon(1e-7));
                });
            }
        }
    }
}

TEST_CASE("diagnose: internal consistency of the composed diagnostics") {
    std::size_t defect_dominant = 0;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const auto pop = fixtures::random_population(64, 321 + seed);
        const auto m = fixtures::random_membership(64, 654 + seed);
        const auto d = diagnose(pop, m);
        CHECK(d.actual_error ==
              doctest::Approx(d.rho * d.dropout_factor * d.sigma_y).epsilon(1e-12));
        CHECK(d.f == doctest::Approx(static_cast<double>(d.sample_size) /
                                     static_cast<double>(d.population_size)));
        CHECK(d.required_z >= 1.0);
        CHECK(d.relative_reduction >= 0.0);
        CHECK(d.relative_reduction < 1.0);
        if (d.n_eff <= static_cast<double>(d.sample_size)) {
            ++defect_dominant;
            CHECK(d.required_z ==
                  doctest::Approx(std::sqrt(static_cast<double>(d.sample_size) /
                                            static_cast<double>(d.n_eff_ceil())))
                      .epsilon(1e-14));
            CHECK(d.relative_reduction ==
                  doctest::Approx(1.0 - d.n_eff / static_cast<double>(d.sample_size))
                      .epsilon(1e-14));
        } else {
            // below SRS parity nothing is lost
            CHECK(d.required_z == 1.0);
            CHECK(d.relative_reduction == 0.0);
        }
    }
    CHECK(defect_dominant > 0); // both regimes must actually occur
}

TEST_CASE("diagnose: census membership raises") {
    const auto pop = fixtures::binary_population({1, 0});
    CHECK_THROWS_AS(diagnose(pop, fixtures::membership_of({1, 1})), DegenerateError);
}

TEST_CASE("diagnostics JSON round-trip uses the flat key set") {
    const auto pop = fixtures::random_population(50, 1);
    const auto m = fixtures::random_membership(50, 2);
    const auto d = diagnose(pop, m);
    const nlohmann::json j = d;
    CHECK(j.size() == 8);
    for (const char* key : {"rho", "f", "sigma_y", "actual_error", "n_eff", "n_eff_clamped",
                            "required_z", "relative_reduction"}) {
        CHECK(j.contains(key));
    }
    const auto back = j.get<DefectDiagnostics>();
    CHECK(back.rho == d.rho);
    CHECK(back.n_eff == d.n_eff);
    CHECK(back.required_z == d.required_z);
}
