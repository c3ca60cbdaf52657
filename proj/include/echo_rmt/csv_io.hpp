#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "echo_rmt/common.hpp"
#include "echo_rmt/concurrence_cp.hpp"
#include "echo_rmt/fidelity_mc.hpp"
#include "echo_rmt/fidelity_theory.hpp"
#include "echo_rmt/spectator_purity.hpp"

namespace echo_rmt {

/// An output file could not be written or an input file read.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Column-major table with a header row.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;

    [[nodiscard]] std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }

    [[nodiscard]] const std::vector<double>& column(const std::string& name) const
    {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) {
                return columns[i];
            }
        }
        throw ConfigError("csv: no column '" + name + "'");
    }
};

/// Shortest round-tripping representation (17 significant digits).
inline std::string format_double(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline void write_csv(const CsvTable& table, const std::string& path)
{
    require(!table.header.empty() && table.header.size() == table.columns.size(), "csv: header and columns disagree");
    require(table.rows() > 0, "csv: refusing to write an empty series");
    for (const auto& c : table.columns) {
        require(c.size() == table.rows(), "csv: columns have different lengths");
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        out << (i ? "," : "") << table.header[i];
    }
    out << '\n';
    for (std::size_t r = 0; r < table.rows(); ++r) {
        for (std::size_t i = 0; i < table.columns.size(); ++i) {
            out << (i ? "," : "") << format_double(table.columns[i][r]);
        }
        out << '\n';
    }
    out.flush();
    if (!out) {
        throw IoError("write to '" + path + "' failed");
    }
}

inline CsvTable read_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path + "' for reading");
    }
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) {
        throw IoError("'" + path + "' is empty");
    }
    std::stringstream head(line);
    for (std::string cell; std::getline(head, cell, ',');) {
        table.header.push_back(cell);
    }
    table.columns.resize(table.header.size());
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::stringstream row(line);
        std::size_t i = 0;
        for (std::string cell; std::getline(row, cell, ','); ++i) {
            if (i >= table.columns.size()) {
                throw IoError("'" + path + "': row has more cells than the header");
            }
            table.columns[i].push_back(std::stod(cell));
        }
        if (i != table.columns.size()) {
            throw IoError("'" + path + "': row has fewer cells than the header");
        }
    }
    return table;
}

inline CsvTable to_table(const FidelitySeries& s)
{
    return {{"t_over_tauh", "re_f", "im_f", "stderr_re_f", "F", "stderr_F"},
            {s.t_over_tau_h, s.mean_re_f, s.mean_im_f, s.stderr_re_f, s.mean_F, s.stderr_F}};
}

inline CsvTable to_table(const PuritySeries& s)
{
    return {{"t_over_tauh", "P", "stderr_P"}, {s.t_over_tau_h, s.mean_P, s.stderr_P}};
}

inline CsvTable to_table(const CPCurve& curve)
{
    CsvTable t{{"P", "C", "stderr_C", "n_samples"}, std::vector<std::vector<double>>(4)};
    for (const auto& b : curve.points) {
        t.columns[0].push_back(b.purity);
        t.columns[1].push_back(b.concurrence);
        t.columns[2].push_back(b.stderr_concurrence);
        t.columns[3].push_back(static_cast<double>(b.n_samples));
    }
    return t;
}

inline CsvTable to_table(const TheoryCurve& c)
{
    return {{"t", "value"}, {c.t, c.value}};
}

template <class Series>
void write_series_csv(const Series& series, const std::string& path)
{
    write_csv(to_table(series), path);
}

/// Sidecar path for an output file: `<path>.json`.
inline std::string metadata_path(const std::string& csv_path)
{
    return csv_path + ".json";
}

inline void write_metadata(const nlohmann::json& meta, const std::string& csv_path)
{
    const std::string path = metadata_path(csv_path);
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    out << meta.dump(2) << '\n';
    if (!out) {
        throw IoError("write to '" + path + "' failed");
    }
}

} // namespace echo_rmt
