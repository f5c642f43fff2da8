#include "sampledefect/population.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "sampledefect/numeric.hpp"

namespace sbd {

SampleMembership::SampleMembership(std::vector<std::uint8_t> flags) : flags_(std::move(flags)) {
    for (auto f : flags_) {
        if (f > 1) throw InputError("membership flags must be 0 or 1");
        count_ += f;
    }
}

SampleMembership SampleMembership::from_indices(std::size_t population_size,
                                                std::span<const std::uint32_t> indices) {
    std::vector<std::uint8_t> flags(population_size, 0);
    for (auto i : indices) {
        if (i >= population_size) throw InputError("membership index out of range");
        if (flags[i]) throw InputError("duplicate membership index");
        flags[i] = 1;
    }
    return SampleMembership(std::move(flags));
}

std::vector<std::uint32_t> SampleMembership::indices() const {
    std::vector<std::uint32_t> out;
    out.reserve(count_);
    for (std::size_t i = 0; i < flags_.size(); ++i) {
        if (flags_[i]) out.push_back(static_cast<std::uint32_t>(i));
    }
    return out;
}

Population::Population(std::vector<std::string> ids, std::vector<double> y,
                       std::vector<std::string> covariate_names, std::vector<double> covariates,
                       std::vector<GridCell> cells)
    : ids_(std::move(ids)), y_(std::move(y)), covariate_names_(std::move(covariate_names)),
      covariates_(std::move(covariates)), cells_(std::move(cells)) {
    const std::size_t n = y_.size();
    if (n == 0) throw InputError("population must contain at least one unit");
    if (ids_.size() != n) throw InputError("id column length does not match y");
    for (double v : y_) {
        if (!std::isfinite(v)) throw InputError("non-finite y value");
    }
    {
        std::unordered_set<std::string_view> seen;
        seen.reserve(n);
        for (const auto& id : ids_) {
            if (!seen.insert(id).second) throw InputError("duplicate unit id \"" + id + "\"");
        }
    }
    const std::size_t dim = covariate_names_.size();
    if (covariates_.size() != n * dim) {
        throw InputError("covariate block size does not match N x dim");
    }
    for (double v : covariates_) {
        if (!std::isfinite(v)) throw InputError("non-finite covariate value");
    }
    if (!cells_.empty()) {
        if (cells_.size() != n) throw InputError("grid cell column length does not match y");
        for (const auto& c : cells_) {
            if (c.row < 0 || c.col < 0) throw InputError("grid coordinates must be non-negative");
        }
    }
}

std::span<const double> Population::covariate_row(std::size_t i) const {
    const std::size_t dim = covariate_dim();
    return {covariates_.data() + i * dim, dim};
}

UnitView Population::unit(std::size_t i) const {
    return UnitView{ids_[i], y_[i], covariate_row(i), cells_.empty() ? nullptr : &cells_[i]};
}

bool Population::binary_y() const {
    return std::all_of(y_.begin(), y_.end(), [](double v) { return v == 0.0 || v == 1.0; });
}

PopulationStats population_stats(const Population& pop) {
    const auto ys = pop.y();
    const double mean = mean_of(ys);
    KahanSum ss;
    for (double v : ys) {
        const double d = v - mean;
        ss.add(d * d);
    }
    const double variance = ss.value() / static_cast<double>(ys.size());
    return PopulationStats{ys.size(), mean, std::sqrt(std::max(variance, 0.0))};
}

SampleStats sample_stats(const Population& pop, const SampleMembership& m) {
    if (m.size() != pop.size()) throw InputError("membership length does not match population");
    if (m.count() == 0) throw DegenerateError("empty sample: no units to average");
    KahanSum s;
    const auto ys = pop.y();
    for (std::size_t i = 0; i < ys.size(); ++i) {
        if (m[i]) s.add(ys[i]);
    }
    return SampleStats{m.count(), s.value() / static_cast<double>(m.count())};
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

} // namespace

LoadedPopulation load_population(std::istream& source, const ColumnMapping& schema) {
    std::string line;
    if (!std::getline(source, line)) throw InputError("empty table: missing header row");
    const auto header = split_csv_line(line);

    long id_col = -1, y_col = -1, sampled_col = -1, row_col = -1, col_col = -1;
    std::vector<std::size_t> cov_cols;
    std::vector<std::string> cov_names;
    for (std::size_t i = 0; i < header.size(); ++i) {
        const auto& h = header[i];
        if (h == schema.id) {
            if (id_col >= 0) throw InputError("duplicate id column");
            id_col = static_cast<long>(i);
        } else if (h == schema.y) {
            if (y_col >= 0) throw InputError("duplicate y column");
            y_col = static_cast<long>(i);
        } else if (h == schema.sampled) {
            sampled_col = static_cast<long>(i);
        } else if (h == schema.row) {
            row_col = static_cast<long>(i);
        } else if (h == schema.col) {
            col_col = static_cast<long>(i);
        } else {
            cov_cols.push_back(i);
            cov_names.push_back(h);
        }
    }
    if (id_col < 0) throw InputError("missing required column \"" + schema.id + "\"");
    if (y_col < 0) throw InputError("missing required column \"" + schema.y + "\"");
    if ((row_col >= 0) != (col_col >= 0)) {
        throw InputError("grid coordinates need both \"" + schema.row + "\" and \"" + schema.col +
                         "\" columns");
    }

    std::vector<std::string> ids;
    std::vector<double> ys;
    std::vector<double> covariates;
    std::vector<GridCell> cells;
    std::vector<std::uint8_t> flags;

    std::size_t line_no = 1;
    while (std::getline(source, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != header.size()) {
            throw InputError("line " + std::to_string(line_no) + ": expected " +
                             std::to_string(header.size()) + " fields, got " +
                             std::to_string(fields.size()));
        }
        ids.push_back(fields[static_cast<std::size_t>(id_col)]);

        double yv;
        if (!parse_double(fields[static_cast<std::size_t>(y_col)], yv) || !std::isfinite(yv)) {
            throw InputError("line " + std::to_string(line_no) + ": non-numeric y value \"" +
                             fields[static_cast<std::size_t>(y_col)] + "\"");
        }
        ys.push_back(yv);

        for (auto c : cov_cols) {
            double cv;
            if (!parse_double(fields[c], cv) || !std::isfinite(cv)) {
                throw InputError("line " + std::to_string(line_no) +
                                 ": non-numeric covariate value \"" + fields[c] + "\"");
            }
            covariates.push_back(cv);
        }

        if (row_col >= 0) {
            long long r, c;
            if (!parse_int64(fields[static_cast<std::size_t>(row_col)], r) ||
                !parse_int64(fields[static_cast<std::size_t>(col_col)], c) || r < 0 || c < 0) {
                throw InputError("line " + std::to_string(line_no) +
                                 ": grid coordinates must be non-negative integers");
            }
            cells.push_back(GridCell{r, c});
        }

        if (sampled_col >= 0) {
            const auto& s = fields[static_cast<std::size_t>(sampled_col)];
            if (s == "0") {
                flags.push_back(0);
            } else if (s == "1") {
                flags.push_back(1);
            } else {
                throw InputError("line " + std::to_string(line_no) + ": sampled value \"" + s +
                                 "\" outside {0,1}");
            }
        }
    }
    if (ys.empty()) throw InputError("empty table: no data rows");

    Population pop(std::move(ids), std::move(ys), std::move(cov_names), std::move(covariates),
                   std::move(cells));
    std::optional<SampleMembership> membership;
    if (sampled_col >= 0) membership = SampleMembership(std::move(flags));
    return LoadedPopulation{std::move(pop), std::move(membership)};
}

LoadedPopulation load_population_file(const std::filesystem::path& path,
                                      const ColumnMapping& schema) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open population file: " + path.string());
    return load_population(in, schema);
}

void save_population(const Population& pop, const std::optional<SampleMembership>& m,
                     std::ostream& out) {
    if (m && m->size() != pop.size()) {
        throw InputError("membership length does not match population");
    }
    for (const auto& id : pop.ids()) {
        if (id.find_first_of(",\n\r") != std::string::npos) {
            throw InputError("unit id \"" + id + "\" contains a CSV delimiter");
        }
    }
    for (const auto& name : pop.covariate_names()) {
        if (name.find_first_of(",\n\r") != std::string::npos) {
            throw InputError("covariate name \"" + name + "\" contains a CSV delimiter");
        }
    }

    out << "id,y";
    if (m) out << ",sampled";
    if (pop.gridded()) out << ",row,col";
    for (const auto& name : pop.covariate_names()) out << ',' << name;
    out << '\n';

    for (std::size_t i = 0; i < pop.size(); ++i) {
        out << pop.ids()[i] << ',' << format_double(pop.y()[i]);
        if (m) out << ',' << ((*m)[i] ? '1' : '0');
        if (pop.gridded()) {
            out << ',' << pop.cells()[i].row << ',' << pop.cells()[i].col;
        }
        for (double c : pop.covariate_row(i)) out << ',' << format_double(c);
        out << '\n';
    }
}

void save_population_file(const Population& pop, const std::optional<SampleMembership>& m,
                          const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write population file: " + path.string());
    save_population(pop, m, out);
    if (!out) throw InputError("write failed: " + path.string());
}

} // namespace sbd
