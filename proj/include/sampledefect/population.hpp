#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sampledefect/error.hpp"

namespace sbd {

struct GridCell {
    std::int64_t row = 0;
    std::int64_t col = 0;
    bool operator==(const GridCell&) const = default;
};

// Inclusion indicator aligned to a population: flags[i] == 1 when unit i is
// in the sample. count() is the sample size n.
class SampleMembership {
  public:
    SampleMembership() = default;
    explicit SampleMembership(std::vector<std::uint8_t> flags);
    static SampleMembership from_indices(std::size_t population_size,
                                         std::span<const std::uint32_t> indices);

    std::size_t size() const { return flags_.size(); }
    std::size_t count() const { return count_; }
    bool operator[](std::size_t i) const { return flags_[i] != 0; }
    const std::vector<std::uint8_t>& flags() const { return flags_; }
    std::vector<std::uint32_t> indices() const;

    bool operator==(const SampleMembership&) const = default;

  private:
    std::vector<std::uint8_t> flags_;
    std::size_t count_ = 0;
};

struct UnitView {
    const std::string& id;
    double y;
    std::span<const double> covariates;
    const GridCell* cell; // nullptr when the population is not gridded
};

// A finite population: the complete frame of N units against which all
// diagnostics are measured. Immutable after construction; safe to share
// across threads.
//
// Storage is columnar. Covariates are a row-major N x dim block; grid cells
// are all-or-none.
class Population {
  public:
    Population(std::vector<std::string> ids, std::vector<double> y,
               std::vector<std::string> covariate_names = {},
               std::vector<double> covariates = {}, std::vector<GridCell> cells = {});

    std::size_t size() const { return y_.size(); }
    std::span<const double> y() const { return y_; }
    const std::vector<std::string>& ids() const { return ids_; }

    std::size_t covariate_dim() const { return covariate_names_.size(); }
    const std::vector<std::string>& covariate_names() const { return covariate_names_; }
    std::span<const double> covariate_row(std::size_t i) const;
    std::span<const double> covariates() const { return covariates_; }

    bool gridded() const { return !cells_.empty(); }
    const std::vector<GridCell>& cells() const { return cells_; }

    UnitView unit(std::size_t i) const;
    bool binary_y() const; // every y in {0, 1}

  private:
    std::vector<std::string> ids_;
    std::vector<double> y_;
    std::vector<std::string> covariate_names_;
    std::vector<double> covariates_;
    std::vector<GridCell> cells_;
};

struct PopulationStats {
    std::size_t n = 0;
    double mean = 0;
    double sd = 0; // divide-by-N convention: a descriptive quantity, not an estimator
};

struct SampleStats {
    std::size_t n = 0;
    double mean = 0;
};

PopulationStats population_stats(const Population& pop);
SampleStats sample_stats(const Population& pop, const SampleMembership& m);

// CSV ingestion. Schema: id,y[,sampled][,row,col][,covariate columns...].
// The header row is mandatory; any column not named by the mapping is read
// as a covariate. `sampled`, when present, becomes the returned membership.
struct ColumnMapping {
    std::string id = "id";
    std::string y = "y";
    std::string sampled = "sampled";
    std::string row = "row";
    std::string col = "col";
};

struct LoadedPopulation {
    Population population;
    std::optional<SampleMembership> membership;
};

LoadedPopulation load_population(std::istream& source, const ColumnMapping& schema = {});
LoadedPopulation load_population_file(const std::filesystem::path& path,
                                      const ColumnMapping& schema = {});

// Canonical UTF-8 CSV with '.' decimal separator. Doubles are written in
// shortest round-trip form, so save -> load reproduces y and covariates
// bit-exactly.
void save_population(const Population& pop, const std::optional<SampleMembership>& m,
                     std::ostream& out);
void save_population_file(const Population& pop, const std::optional<SampleMembership>& m,
                          const std::filesystem::path& path);

} // namespace sbd
