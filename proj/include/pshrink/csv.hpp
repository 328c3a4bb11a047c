#pragma once

// CSV surfaces: single-column sample files and the risk table.
// Numbers are written with 17 significant digits so doubles round-trip.

#include <cstdio>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "harness.hpp"

namespace pshrink::csv {

inline constexpr const char* kRiskHeader = "signal,method,n,snr,reps,mean_risk,std_error,relative_risk";
inline constexpr const char* kSampleHeader = "value";

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail {

inline std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

inline bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    std::size_t used = 0;
    try {
        out = std::stod(s, &used);
    } catch (const std::exception&) {
        return false;
    }
    return used == s.size();
}

}  // namespace detail

/// Reads one value per line. A non-numeric first line is taken as a header;
/// blank lines are skipped. Any other non-numeric line is an InputError.
inline std::vector<double> read_samples(std::istream& in) {
    std::vector<double> values;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string cell = detail::trim(line);
        if (cell.empty()) continue;
        double v = 0.0;
        if (detail::parse_double(cell, v)) {
            values.push_back(v);
        } else if (!(values.empty() && line_no == 1)) {
            throw InputError("line " + std::to_string(line_no) + ": not a number: '" + cell + "'");
        }
    }
    return values;
}

inline void write_samples(std::ostream& out, std::span<const double> values) {
    out << kSampleHeader << '\n';
    for (double v : values) out << format_double(v) << '\n';
}

inline void write_risk_table(std::ostream& out, std::span<const RiskReport> reports) {
    out << kRiskHeader << '\n';
    for (const auto& r : reports) {
        out << r.signal << ',' << r.method << ',' << r.n << ',' << format_double(r.snr) << ',' << r.reps << ','
            << format_double(r.mean_risk) << ',' << format_double(r.std_error) << ','
            << format_double(r.relative_risk) << '\n';
    }
}

}  // namespace pshrink::csv
