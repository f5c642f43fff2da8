#include "doctest.h"

#include <array>
#include <cmath>

#include "sampledefect/casestudy.hpp"
#include "sampledefect/defect.hpp"
#include "sampledefect/rng.hpp"
#include "sampledefect/sampler.hpp"

#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace sbd;

TEST_CASE("splitmix64 reference vectors") {
    // published sequence for seed 0; pins the bit-exact stream contract
    SplitMix64 rng(0);
    CHECK(rng.next() == 0xE220A8397B1DCDAFULL);
    CHECK(rng.next() == 0x6E789E6AA1B965F4ULL);
    CHECK(rng.next() == 0x06C45D188009454FULL);
}

TEST_CASE("derive_seed is order-free and spreads indices") {
    CHECK(derive_seed(42, 0) != derive_seed(42, 1));
    CHECK(derive_seed(42, 5) == derive_seed(42, 5));
    CHECK(derive_seed(42, 5) != derive_seed(43, 5));
}

TEST_CASE("srs: size, determinism, census") {
    const auto pop = fixtures::random_population(100, 3);
    SUBCASE("exactly n units, deterministic in the seed") {
        const auto a = srs(pop, 17, 12345);
        const auto b = srs(pop, 17, 12345);
        const auto c = srs(pop, 17, 54321);
        CHECK(a.count() == 17);
        CHECK(a == b);
        CHECK(a != c);
        CHECK(c.count() == 17);
    }
    SUBCASE("n = N gives the all-ones membership") {
        const auto m = srs(pop, 100, 7);
        CHECK(m.count() == 100);
    }
    SUBCASE("n > N rejected") {
        CHECK_THROWS_AS(srs(pop, 101, 7), InputError);
    }
}

TEST_CASE("srs: per-unit inclusion frequency approaches n/N") {
    const auto pop = fixtures::binary_population({1, 1, 0, 0});
    std::array<std::size_t, 4> hits{};
    const std::size_t draws = 10000;
    for (std::size_t r = 0; r < draws; ++r) {
        const auto m = srs(pop, 2, derive_seed(0xABCD, r));
        for (std::size_t i = 0; i < 4; ++i) {
            if (m[i]) ++hits[i];
        }
    }
    for (const auto h : hits) {
        CHECK(static_cast<double>(h) / static_cast<double>(draws) ==
              doctest::Approx(0.5).epsilon(0.04));
    }
}

TEST_CASE("targeted sampler: y=(1,1,0,0), n=2, target 1 picks exactly the ones") {
    const auto pop = fixtures::binary_population({1, 1, 0, 0});
    const auto m = targeted_rho_sample(pop, 2, 1.0, 9);
    CHECK(m[0]);
    CHECK(m[1]);
    CHECK_FALSE(m[2]);
    CHECK_FALSE(m[3]);
    CHECK(defect_correlation(pop, m) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("targeted sampler: target 0 reduces to a proportionate draw") {
    std::vector<double> y(200, 0.0);
    for (std::size_t i = 0; i < 60; ++i) y[i] = 1.0; // p = 0.3
    const auto pop = fixtures::binary_population(y);
    const auto m = targeted_rho_sample(pop, 50, 0.0, 11);
    CHECK(m.count() == 50);
    std::size_t ones = 0;
    for (const auto i : m.indices()) ones += pop.y()[i] == 1.0;
    CHECK(ones == 15); // round(50 * 0.3)
    CHECK(std::abs(defect_correlation(pop, m)) < 0.02);
}

TEST_CASE("targeted sampler: per-draw rounding bound") {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        SplitMix64 cfg(seed);
        const std::size_t n_pop = 40 + cfg.bounded(160);
        const std::size_t ones = 1 + cfg.bounded(n_pop - 1);
        std::vector<double> y(n_pop, 0.0);
        for (std::size_t i = 0; i < ones; ++i) y[i] = 1.0;
        const auto pop = fixtures::binary_population(y);
        const std::size_t n = 1 + cfg.bounded(n_pop - 1);

        const auto range = feasible_rho_range(pop, n);
        const double span = range.hi - range.lo;
        const double target = range.lo + 0.37 * span;

        const double f = static_cast<double>(n) / static_cast<double>(n_pop);
        const double p = static_cast<double>(ones) / static_cast<double>(n_pop);
        const double bound = 1.0 / (static_cast<double>(n_pop) * std::sqrt(f * (1 - f)) *
                                    std::sqrt(p * (1 - p)));

        const auto m = targeted_rho_sample(pop, n, target, 1000 + seed);
        CHECK(m.count() == n);
        const double realized = defect_correlation(pop, m);
        CHECK(std::abs(realized - target) <= bound + 1e-12);
    }
}

TEST_CASE("targeted sampler: realized rho matches the exhaustive best allocation (N <= 12)") {
    for (std::size_t n_pop = 4; n_pop <= 12; ++n_pop) {
        for (std::size_t ones = 1; ones < n_pop; ++ones) {
            std::vector<double> y(n_pop, 0.0);
            for (std::size_t i = 0; i < ones; ++i) y[i] = 1.0;
            const auto pop = fixtures::binary_population(y);
            for (std::size_t n = 1; n < n_pop; ++n) {
                const auto range = feasible_rho_range(pop, n);
                for (const double frac : {0.0, 0.21, 0.5, 0.83, 1.0}) {
                    const double target = range.lo + frac * (range.hi - range.lo);
                    const auto m = targeted_rho_sample(pop, n, target, 77);
                    const double realized = defect_correlation(pop, m);
                    const double best = static_cast<double>(
                        oracle::best_allocation_rho(y, n, static_cast<long double>(target)));
                    CHECK(std::abs(realized - target) <=
                          std::abs(best - target) + 1e-12);
                }
            }
        }
    }
}

TEST_CASE("targeted sampler: infeasible target names the attainable range") {
    std::vector<double> y(100, 0.0);
    for (std::size_t i = 0; i < 10; ++i) y[i] = 1.0;
    const auto pop = fixtures::binary_population(y);
    // n = 50 > ones-count, so rho = +1 is unattainable
    CHECK_THROWS_WITH_AS(targeted_rho_sample(pop, 50, 1.0, 1),
                         doctest::Contains("attainable range"), InputError);
}

TEST_CASE("targeted sampler: non-binary y rejected") {
    const auto pop = fixtures::binary_population({0.5, 1.0, 0.0});
    CHECK_THROWS_AS(targeted_rho_sample(pop, 1, 0.0, 1), DegenerateError);
}

TEST_CASE("feasible rho range") {
    SUBCASE("balanced tiny population spans [-1, 1]") {
        const auto pop = fixtures::binary_population({1, 1, 0, 0});
        const auto r = feasible_rho_range(pop, 2);
        CHECK(r.lo == doctest::Approx(-1.0).epsilon(1e-12));
        CHECK(r.hi == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("matches exhaustive enumeration on N = 5, n = N-1") {
        const std::vector<double> y{1, 1, 0, 0, 0};
        const auto pop = fixtures::binary_population(y);
        const auto r = feasible_rho_range(pop, 4);
        const auto [lo, hi] = oracle::feasible_rho_range_exhaustive(y, 4);
        CHECK(r.lo == doctest::Approx(static_cast<double>(lo)).epsilon(1e-10));
        CHECK(r.hi == doctest::Approx(static_cast<double>(hi)).epsilon(1e-10));
        CHECK(r.hi - r.lo < 1.5); // much narrower than the full [-1, 1]
    }
    SUBCASE("matches exhaustive enumeration across small binary populations") {
        for (std::size_t n_pop = 3; n_pop <= 10; ++n_pop) {
            for (std::size_t ones = 1; ones < n_pop; ++ones) {
                std::vector<double> y(n_pop, 0.0);
                for (std::size_t i = 0; i < ones; ++i) y[i] = 1.0;
                for (std::size_t n = 1; n < n_pop; ++n) {
                    const auto r = feasible_rho_range(fixtures::binary_population(y), n);
                    const auto [lo, hi] = oracle::feasible_rho_range_exhaustive(y, n);
                    CHECK(r.lo == doctest::Approx(static_cast<double>(lo)).epsilon(1e-9));
                    CHECK(r.hi == doctest::Approx(static_cast<double>(hi)).epsilon(1e-9));
                }
            }
        }
    }
    SUBCASE("all-zero population is degenerate") {
        const auto pop = fixtures::binary_population({0, 0, 0, 0});
        CHECK_THROWS_AS(feasible_rho_range(pop, 2), DegenerateError);
    }
}

TEST_CASE("case study: the published design lands on the published numbers") {
    const auto gp = case_study::make_population();
    const auto& pop = gp.population();
    CHECK(pop.size() == 229772);
    const auto ps = population_stats(pop);
    CHECK(ps.mean == doctest::Approx(0.299).epsilon(5e-4)); // reconstructed 68702/229772

    const auto m = case_study::draw_sample(pop, 2024);
    CHECK(m.count() == 19419);
    const auto ss = sample_stats(pop, m);
    CHECK(ss.mean == doctest::Approx(0.213).epsilon(0.015));
    const double rho = defect_correlation(pop, m);
    CHECK(rho >= -0.059);
    CHECK(rho <= -0.057);
}

TEST_CASE("sampler spec JSON round-trip") {
    SamplerSpec spec{SamplerKind::targeted_rho, 19419, -0.058, 99};
    const nlohmann::json j = spec;
    CHECK(j.at("kind") == "targeted_rho");
    const auto back = j.get<SamplerSpec>();
    CHECK(back.kind == spec.kind);
    CHECK(back.n == spec.n);
    CHECK(back.target_rho == spec.target_rho);
    CHECK(back.seed == spec.seed);

    const auto srs_spec = nlohmann::json{{"kind", "srs"}, {"n", 28}}.get<SamplerSpec>();
    CHECK(srs_spec.kind == SamplerKind::srs);
    CHECK(srs_spec.seed == 0); // defaulted

    CHECK_THROWS_AS(nlohmann::json{{"kind", "mystery"}}.get<SamplerSpec>(), InputError);
}
