#ifndef ASPH_IO_HPP
#define ASPH_IO_HPP

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "particles.hpp"

namespace asph
{

/// Shortest representation that round-trips a double (17 significant digits).
inline std::string format_double(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

/// Particle snapshot CSV: header x,y[,z],<field>..., one row per particle.
template <int D>
void write_snapshot_csv(const ParticleSet<D> &ps, const std::vector<std::string> &field_names,
                        const std::string &path)
{
    std::ofstream out(path);
    if (!out)
        throw IoFailure("cannot open " + path);
    const char *axes[3] = {"x", "y", "z"};
    for (int k = 0; k < D; ++k)
        out << (k ? "," : "") << axes[k];
    for (const auto &name : field_names)
        out << ',' << name;
    out << '\n';
    for (std::int64_t i = 0; i < ps.size(); ++i)
    {
        for (int k = 0; k < D; ++k)
            out << (k ? "," : "") << format_double(ps.pos[static_cast<std::size_t>(i)][k]);
        for (const auto &name : field_names)
            out << ',' << format_double(ps.field(name)[static_cast<std::size_t>(i)]);
        out << '\n';
    }
    if (!out)
        throw IoFailure("write failed: " + path);
}

/// Reads a snapshot CSV back into column vectors keyed by header name.
inline std::vector<std::pair<std::string, std::vector<double>>> read_csv_columns(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw IoFailure("cannot open " + path);
    std::string line;
    if (!std::getline(in, line))
        throw IoFailure("empty file: " + path);
    std::vector<std::pair<std::string, std::vector<double>>> cols;
    {
        std::stringstream ss(line);
        std::string name;
        while (std::getline(ss, name, ','))
            cols.emplace_back(name, std::vector<double>{});
    }
    while (std::getline(in, line))
    {
        if (line.empty())
            continue;
        std::stringstream ss(line);
        std::string cell;
        std::size_t c = 0;
        while (std::getline(ss, cell, ','))
        {
            if (c >= cols.size())
                throw IoFailure("row wider than header in " + path);
            cols[c++].second.push_back(std::stod(cell));
        }
    }
    return cols;
}

/// Legacy ASCII VTK unstructured points with one point-data array per field.
template <int D>
void write_snapshot_vtk(const ParticleSet<D> &ps, const std::vector<std::string> &field_names,
                        const std::string &path)
{
    std::ofstream out(path);
    if (!out)
        throw IoFailure("cannot open " + path);
    const std::int64_t n = ps.size();
    out << "# vtk DataFile Version 3.0\n";
    out << "particle snapshot\n";
    out << "ASCII\n";
    out << "DATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << n << " double\n";
    for (std::int64_t i = 0; i < n; ++i)
    {
        for (int k = 0; k < 3; ++k)
            out << (k ? " " : "")
                << format_double(k < D ? ps.pos[static_cast<std::size_t>(i)][k] : 0.0);
        out << '\n';
    }
    out << "CELLS " << n << ' ' << 2 * n << '\n';
    for (std::int64_t i = 0; i < n; ++i)
        out << "1 " << i << '\n';
    out << "CELL_TYPES " << n << '\n';
    for (std::int64_t i = 0; i < n; ++i)
        out << "1\n"; // VTK_VERTEX
    out << "POINT_DATA " << n << '\n';
    for (const auto &name : field_names)
    {
        out << "SCALARS " << name << " double 1\n";
        out << "LOOKUP_TABLE default\n";
        const auto &f = ps.field(name);
        for (std::int64_t i = 0; i < n; ++i)
            out << format_double(f[static_cast<std::size_t>(i)]) << '\n';
    }
    if (!out)
        throw IoFailure("write failed: " + path);
}

/// Metrics summary: ordered key = value lines.
inline void write_metrics(const std::vector<std::pair<std::string, std::string>> &entries,
                          const std::string &path)
{
    std::ofstream out(path);
    if (!out)
        throw IoFailure("cannot open " + path);
    for (const auto &[key, value] : entries)
        out << key << " = " << value << '\n';
    if (!out)
        throw IoFailure("write failed: " + path);
}

struct CrossSectionRow
{
    double coordinate;
    double numeric;
    double analytic;
};

inline void write_cross_section(const std::vector<CrossSectionRow> &rows, const std::string &path)
{
    std::ofstream out(path);
    if (!out)
        throw IoFailure("cannot open " + path);
    out << "coordinate,numeric,analytic\n";
    for (const auto &row : rows)
        out << format_double(row.coordinate) << ',' << format_double(row.numeric) << ','
            << format_double(row.analytic) << '\n';
    if (!out)
        throw IoFailure("write failed: " + path);
}

inline void ensure_directory(const std::string &dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw IoFailure("cannot create directory " + dir + ": " + ec.message());
}

} // namespace asph

#endif
