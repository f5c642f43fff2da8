#pragma once

#include <cstdint>

#include "sampledefect/grid.hpp"
#include "sampledefect/population.hpp"

namespace sbd::case_study {

// Bundled synthetic demo: a national-scale occupancy survey on a 1-unit grid.
// 229,772 land cells, 68,702 of them occupied (mean 0.299), and a volunteer
// recording scheme that visited 19,419 cells with a defect correlation of
// -0.058 against occupancy. All values are reconstructions from published
// summary statistics; the spatial pattern is synthetic.
inline constexpr std::size_t population_size = 229772;
inline constexpr std::size_t occupied_cells = 68702;
inline constexpr std::size_t sample_size = 19419;
inline constexpr double target_rho = -0.058;
inline constexpr std::size_t grid_cols = 480;

// Deterministic: the occupancy surface is a fixed mixture of smooth bumps
// plus hashed noise, thresholded to exactly `occupied_cells` ones.
GridPopulation make_population();

// The biased volunteer design (targeted_rho at the published n and rho).
SampleMembership draw_sample(const Population& pop, std::uint64_t seed);

} // namespace sbd::case_study
