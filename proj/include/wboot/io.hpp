#pragma once

// File plumbing: single-column CSV samples in, CSV tables and raw-statistic
// dumps out. All numeric output goes through one fixed format so identical
// doubles always produce identical bytes.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "wboot/bands.hpp"
#include "wboot/empirical.hpp"

namespace wboot {

// Round-trip-exact decimal rendering (17 significant digits).
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
}

namespace detail {

inline std::string strip_ws(const std::string& line) {
    std::size_t b = 0, e = line.size();
    while (b < e && (line[b] == ' ' || line[b] == '\t' || line[b] == '\r')) ++b;
    while (e > b && (line[e - 1] == ' ' || line[e - 1] == '\t' || line[e - 1] == '\r')) --e;
    return line.substr(b, e - b);
}

inline bool parse_double(const std::string& text, double& out) {
    if (text.empty()) return false;
    char* end = nullptr;
    out = std::strtod(text.c_str(), &end);
    return end == text.c_str() + text.size();
}

}  // namespace detail

// Single-column CSV: one value per line; one optional non-numeric header
// line is skipped; blank lines are ignored.
inline std::vector<double> read_sample_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open sample file: " + path);
    std::vector<double> values;
    std::string line;
    std::size_t line_no = 0;
    bool header_allowed = true;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string text = detail::strip_ws(line);
        if (text.empty()) continue;
        double v = 0.0;
        if (!detail::parse_double(text, v)) {
            if (header_allowed) {
                header_allowed = false;
                continue;
            }
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": not a number: '" + text + "'");
        }
        header_allowed = false;
        values.push_back(v);
    }
    if (values.empty()) throw std::runtime_error("sample file has no data rows: " + path);
    return values;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("failed writing output file: " + path);
}

// (t, lower, fn, upper) rows at the jump points of the empirical CDF.
inline std::string render_cdf_band_csv(const Sample& sample, const CdfBand& band) {
    const StepFunction fn = ecdf(sample);
    std::ostringstream out;
    out << "t,lower,fn,upper\n";
    for (std::size_t k = 0; k < fn.jump_points.size(); ++k) {
        out << format_double(fn.jump_points[k]) << ','
            << format_double(band.lower.cum_values[k]) << ','
            << format_double(fn.cum_values[k]) << ','
            << format_double(band.upper.cum_values[k]) << '\n';
    }
    return out.str();
}

// (x, lower, f, upper) rows over the evaluation grid.
inline std::string render_kde_band_csv(const KdeBand& band) {
    std::ostringstream out;
    out << "x,lower,f,upper\n";
    for (std::size_t g = 0; g < band.x_grid.size(); ++g) {
        out << format_double(band.x_grid[g]) << ',' << format_double(band.lower[g]) << ','
            << format_double(band.center[g]) << ',' << format_double(band.upper[g]) << '\n';
    }
    return out.str();
}

// Two-column function table (t, <name>) for plotting a step function at its
// jump points.
inline std::string render_step_csv(const StepFunction& step, const std::string& value_name) {
    std::ostringstream out;
    out << "t," << value_name << '\n';
    for (std::size_t k = 0; k < step.jump_points.size(); ++k) {
        out << format_double(step.jump_points[k]) << ',' << format_double(step.cum_values[k])
            << '\n';
    }
    return out.str();
}

// Raw per-replicate statistic dump (replicate, <name>).
inline std::string render_values_csv(const std::vector<double>& values,
                                     const std::string& value_name) {
    std::ostringstream out;
    out << "replicate," << value_name << '\n';
    for (std::size_t r = 0; r < values.size(); ++r) {
        out << r << ',' << format_double(values[r]) << '\n';
    }
    return out.str();
}

}  // namespace wboot
