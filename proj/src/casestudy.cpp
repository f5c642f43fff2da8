#include "sampledefect/casestudy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sampledefect/rng.hpp"
#include "sampledefect/sampler.hpp"

namespace sbd::case_study {

namespace {

double bump(double r, double c, double r0, double c0, double scale) {
    const double dr = r - r0;
    const double dc = c - c0;
    return std::exp(-(dr * dr + dc * dc) / (2.0 * scale * scale));
}

// Smooth regional suitability plus per-cell noise; only the ranking matters,
// the threshold is set by the exact occupied-cell count.
double suitability(std::size_t row, std::size_t col, double noise) {
    const auto r = static_cast<double>(row);
    const auto c = static_cast<double>(col);
    double s = 0.0;
    s += 1.00 * bump(r, c, 80.0, 120.0, 90.0);
    s += 0.85 * bump(r, c, 320.0, 90.0, 70.0);
    s += 0.70 * bump(r, c, 200.0, 360.0, 60.0);
    s += 0.55 * bump(r, c, 420.0, 300.0, 80.0);
    s += 0.30 * std::sin(r / 37.0) * std::cos(c / 53.0);
    return s + 0.35 * noise;
}

} // namespace

GridPopulation make_population() {
    std::vector<double> score(population_size);
    SplitMix64 noise_rng(0xC0FFEE5EEDULL);
    for (std::size_t i = 0; i < population_size; ++i) {
        const double u = static_cast<double>(noise_rng.next() >> 11) * 0x1.0p-53;
        score[i] = suitability(i / grid_cols, i % grid_cols, u);
    }

    std::vector<std::uint32_t> order(population_size);
    std::iota(order.begin(), order.end(), 0u);
    std::nth_element(order.begin(), order.begin() + occupied_cells, order.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return score[a] > score[b]; });

    std::vector<double> y(population_size, 0.0);
    for (std::size_t k = 0; k < occupied_cells; ++k) y[order[k]] = 1.0;

    std::vector<std::string> ids(population_size);
    std::vector<GridCell> cells(population_size);
    for (std::size_t i = 0; i < population_size; ++i) {
        const auto r = static_cast<std::int64_t>(i / grid_cols);
        const auto c = static_cast<std::int64_t>(i % grid_cols);
        ids[i] = "cell_" + std::to_string(i);
        cells[i] = GridCell{r, c};
    }
    Population pop(std::move(ids), std::move(y), {}, {}, std::move(cells));
    return GridPopulation(std::move(pop), "1u");
}

SampleMembership draw_sample(const Population& pop, std::uint64_t seed) {
    return targeted_rho_sample(pop, sample_size, target_rho, seed);
}

} // namespace sbd::case_study
