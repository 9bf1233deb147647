#pragma once

// External (x, y) datasets for side-by-side comparison, e.g. Monte Carlo
// equation-of-state points. Two numeric columns, comma or whitespace
// separated; `#` starts a comment.

#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "droplet_dft/errors.hpp"

namespace droplet_dft {

struct ReferencePoint {
    double x;
    double y;
};

struct ReferenceDataset {
    std::vector<ReferencePoint> rows;
    double x_scale = 1.0;
    double y_scale = 1.0;
    std::string source;

    std::size_t size() const noexcept { return rows.size(); }
    bool empty() const noexcept { return rows.empty(); }
};

namespace detail {

inline bool parse_field(const std::string& token, double& out) {
    std::size_t used = 0;
    try {
        out = std::stod(token, &used);
    } catch (const std::exception&) {
        return false;
    }
    return used == token.size() && std::isfinite(out);
}

}  // namespace detail

/// Rows are multiplied by (x_scale, y_scale) into internal units.
inline ReferenceDataset parse_reference(std::istream& in, double x_scale, double y_scale, std::string source = {}) {
    if (!std::isfinite(x_scale) || !std::isfinite(y_scale) || x_scale == 0.0 || y_scale == 0.0)
        throw ValidationError("reference: scales must be finite and nonzero");
    ReferenceDataset ds{{}, x_scale, y_scale, std::move(source)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        for (char& c : line)
            if (c == ',' || c == '\t' || c == '\r') c = ' ';
        std::istringstream fields(line);
        std::vector<std::string> tokens;
        for (std::string t; fields >> t;) tokens.push_back(t);
        if (tokens.empty()) continue;
        if (tokens.size() != 2) throw ParseError("reference: expected two columns", lineno);
        double x = 0.0, y = 0.0;
        if (!detail::parse_field(tokens[0], x) || !detail::parse_field(tokens[1], y))
            throw ParseError("reference: non-numeric value", lineno);
        x *= x_scale;
        y *= y_scale;
        if (!ds.rows.empty() && !(x > ds.rows.back().x))
            throw ValidationError("reference: x must be strictly increasing (line " + std::to_string(lineno) + ")");
        ds.rows.push_back({x, y});
    }
    return ds;
}

inline ReferenceDataset ingest_reference(const std::string& path, double x_scale, double y_scale) {
    std::ifstream in(path);
    if (!in) throw ValidationError("reference: cannot open '" + path + "'");
    return parse_reference(in, x_scale, y_scale, path);
}

}  // namespace droplet_dft
