#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "decum/grid.hpp"

namespace decum {

// Shortest exact decimal form: %.17g round-trips every double. All CSV output
// goes through this so files are byte-stable across runs and thread counts.
inline std::string g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::ofstream open_out(const std::filesystem::path& path) {
    if (!path.parent_path().empty())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);  // binary: no newline translation
    if (!out)
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    return out;
}

inline void write_csv(const std::filesystem::path& path,
                      const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows) {
    auto out = open_out(path);
    for (std::size_t k = 0; k < header.size(); ++k)
        out << (k ? "," : "") << header[k];
    out << '\n';
    for (const auto& row : rows) {
        for (std::size_t k = 0; k < row.size(); ++k)
            out << (k ? "," : "") << row[k];
        out << '\n';
    }
}

// Matrix layout: header "t" then the z nodes; one row per time node.
inline void write_grid_csv(const std::filesystem::path& path, const GridSolution& sol,
                           const std::vector<double>& field) {
    auto out = open_out(path);
    const Grid& g = sol.grid;
    out << 't';
    for (int j = 0; j < g.n_nodes(); ++j) out << ',' << g17(g.z(j));
    out << '\n';
    for (int i = 0; i < g.n_times(); ++i) {
        out << g17(g.t(i));
        for (int j = 0; j < g.n_nodes(); ++j) out << ',' << g17(field[sol.idx(i, j)]);
        out << '\n';
    }
}

}  // namespace decum
