#include "sampledefect/grid.hpp"

#include <fstream>
#include <map>
#include <ostream>
#include <unordered_set>

#include "sampledefect/defect.hpp"
#include "sampledefect/numeric.hpp"

namespace sbd {

GridPopulation::GridPopulation(Population pop, std::string resolution_label)
    : pop_(std::move(pop)), label_(std::move(resolution_label)) {
    if (!pop_.gridded()) throw InputError("grid population requires row/col on every unit");
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(pop_.size());
    for (const auto& c : pop_.cells()) {
        const auto key = (static_cast<std::uint64_t>(c.row) << 32) ^
                         static_cast<std::uint64_t>(c.col);
        if (!seen.insert(key).second) {
            throw InputError("duplicate grid cell (" + std::to_string(c.row) + ", " +
                             std::to_string(c.col) + ")");
        }
    }
}

std::pair<GridPopulation, SampleMembership> aggregate(const GridPopulation& gp,
                                                      const SampleMembership& m, std::size_t k) {
    const auto& pop = gp.population();
    if (k == 0) throw InputError("aggregation factor must be at least 1");
    if (m.size() != pop.size()) throw InputError("membership length does not match population");
    if (!pop.binary_y()) throw DegenerateError("aggregation requires binary y");
    if (k == 1) return {gp, m};

    struct CoarseCell {
        bool occupied = false;
        bool sampled = false;
    };
    std::map<std::pair<std::int64_t, std::int64_t>, CoarseCell> coarse;
    for (std::size_t i = 0; i < pop.size(); ++i) {
        const auto& c = pop.cells()[i];
        auto& cell = coarse[{c.row / static_cast<std::int64_t>(k),
                             c.col / static_cast<std::int64_t>(k)}];
        cell.occupied = cell.occupied || pop.y()[i] == 1.0;
        cell.sampled = cell.sampled || m[i];
    }

    std::vector<std::string> ids;
    std::vector<double> y;
    std::vector<GridCell> cells;
    std::vector<std::uint8_t> flags;
    ids.reserve(coarse.size());
    for (const auto& [rc, cell] : coarse) {
        ids.push_back("r" + std::to_string(rc.first) + "c" + std::to_string(rc.second));
        y.push_back(cell.occupied ? 1.0 : 0.0);
        cells.push_back(GridCell{rc.first, rc.second});
        flags.push_back(cell.sampled ? 1 : 0);
    }
    Population coarse_pop(std::move(ids), std::move(y), {}, {}, std::move(cells));
    return {GridPopulation(std::move(coarse_pop), gp.resolution_label() + "x" + std::to_string(k)),
            SampleMembership(std::move(flags))};
}

std::vector<ResolutionRow> diagnostics_by_resolution(const GridPopulation& gp,
                                                     const SampleMembership& m,
                                                     const std::vector<std::size_t>& factors) {
    std::vector<ResolutionRow> rows;
    rows.reserve(factors.size());
    for (const auto k : factors) {
        auto [coarse_gp, coarse_m] = aggregate(gp, m, k);
        ResolutionRow row;
        row.factor = k;
        row.population_size = coarse_gp.population().size();
        row.sample_size = coarse_m.count();
        row.f = static_cast<double>(row.sample_size) / static_cast<double>(row.population_size);
        try {
            const auto d = diagnose(coarse_gp.population(), coarse_m);
            row.rho = d.rho;
            row.n_eff = d.n_eff;
            row.actual_error = d.actual_error;
            row.status = "ok";
        } catch (const DegenerateError& e) {
            row.status = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_resolution_table(const std::vector<ResolutionRow>& rows, std::ostream& out) {
    out << "factor,N,n,f,rho,n_eff,actual_error,status\n";
    for (const auto& r : rows) {
        out << r.factor << ',' << r.population_size << ',' << r.sample_size << ','
            << format_double(r.f) << ',';
        if (r.rho) out << format_double(*r.rho);
        out << ',';
        if (r.n_eff) out << format_double(*r.n_eff);
        out << ',';
        if (r.actual_error) out << format_double(*r.actual_error);
        out << ',';
        for (char c : r.status) out << (c == ',' ? ';' : c); // keep the row parseable
        out << '\n';
    }
}

void write_resolution_table_file(const std::vector<ResolutionRow>& rows,
                                 const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write resolution table: " + path.string());
    write_resolution_table(rows, out);
    if (!out) throw InputError("write failed: " + path.string());
}

} // namespace sbd
