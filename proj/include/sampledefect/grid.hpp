#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sampledefect/population.hpp"

namespace sbd {

// A population whose units are cells of a regular grid: every unit carries
// (row, col) and no two units share a cell.
class GridPopulation {
  public:
    GridPopulation(Population pop, std::string resolution_label);

    const Population& population() const { return pop_; }
    const std::string& resolution_label() const { return label_; }

  private:
    Population pop_;
    std::string label_;
};

// Coarsen by factor k: fine cell (row, col) maps to (row/k, col/k). A coarse
// cell exists iff at least one fine cell maps to it; its occupancy and
// sampled flag are unions over constituents. Requires binary y. k = 1 returns
// the inputs unchanged; for k > 1 coarse units are ordered by (row, col) and
// given ids "r<row>c<col>".
std::pair<GridPopulation, SampleMembership> aggregate(const GridPopulation& gp,
                                                      const SampleMembership& m, std::size_t k);

struct ResolutionRow {
    std::size_t factor = 0;
    std::size_t population_size = 0;
    std::size_t sample_size = 0;
    double f = 0;
    std::optional<double> rho;
    std::optional<double> n_eff;
    std::optional<double> actual_error;
    std::string status; // "ok", or the degeneracy that blocked the diagnostics
};

// One diagnostics row per coarsening factor; degenerate rows (census at the
// coarse scale, constant y, ...) carry the reason in `status` instead of
// numbers.
std::vector<ResolutionRow> diagnostics_by_resolution(const GridPopulation& gp,
                                                     const SampleMembership& m,
                                                     const std::vector<std::size_t>& factors);

// CSV: factor,N,n,f,rho,n_eff,actual_error,status (blank fields when degenerate)
void write_resolution_table(const std::vector<ResolutionRow>& rows, std::ostream& out);
void write_resolution_table_file(const std::vector<ResolutionRow>& rows,
                                 const std::filesystem::path& path);

} // namespace sbd
