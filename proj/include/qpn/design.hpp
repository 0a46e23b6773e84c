// design.hpp — physical-design estimation: the emitter-ring coupling g from
// material and mode parameters, and inversion of externally computed
// gap -> coupling-rate tables into fabrication gap recommendations.
//
// g = 0.5 sqrt(3 lambda^2 c Gamma_0 / (2 pi n^3 V_eff)), all SI, Gamma_0 an
// angular rate. Gap tables interpolate log(rate) linearly in gap by default,
// since evanescent coupling decays exponentially with gap; plain linear
// interpolation is available behind a flag.

#pragma once

#include <cmath>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "qpn/errors.hpp"

namespace qpn {

inline constexpr double speed_of_light = 299792458.0;  // m/s

struct EmitterModeSpec {
    double lambda = 0.0;   // vacuum wavelength, m
    double gamma0 = 0.0;   // natural linewidth, rad/s
    double n_index = 0.0;  // refractive index
    double v_eff = 0.0;    // effective mode volume, m^3

    void validate() const {
        if (!(lambda > 0.0)) throw validation_error("EmitterModeSpec: lambda must be > 0");
        if (!(gamma0 > 0.0)) throw validation_error("EmitterModeSpec: gamma0 must be > 0");
        if (!(n_index > 0.0)) throw validation_error("EmitterModeSpec: n_index must be > 0");
        if (!(v_eff > 0.0)) throw validation_error("EmitterModeSpec: v_eff must be > 0");
    }
};

inline double coupling_g(const EmitterModeSpec& spec) {
    spec.validate();
    const double n3 = spec.n_index * spec.n_index * spec.n_index;
    return 0.5 * std::sqrt(3.0 * spec.lambda * spec.lambda * speed_of_light * spec.gamma0 /
                           (2.0 * M_PI * n3 * spec.v_eff));
}

// ------------------------------ gap tables ----------------------------------

struct GapRateRow {
    double gap = 0.0;   // m
    double rate = 0.0;  // rad/s
};

enum class GapTableKind { ring_ring, ring_waveguide };

struct GapRateTable {
    GapTableKind kind = GapTableKind::ring_ring;
    std::vector<GapRateRow> rows;

    void validate() const {
        if (rows.size() < 2) throw validation_error("GapRateTable: needs at least two rows");
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (!(rows[i].rate > 0.0))
                throw validation_error("GapRateTable: rate must be > 0 at row " +
                                       std::to_string(i));
            if (i > 0 && !(rows[i].gap > rows[i - 1].gap))
                throw validation_error("GapRateTable: gaps must be strictly increasing at row " +
                                       std::to_string(i));
            if (i > 0 && !(rows[i].rate < rows[i - 1].rate))
                throw validation_error(
                    "GapRateTable: rates must be strictly decreasing with gap at row " +
                    std::to_string(i));
        }
    }
};

// CSV with header `gap_nm, rate_ghz`; gaps are converted to meters and rates to
// angular rad/s (rate_ghz is an ordinary frequency in GHz).
inline GapRateTable read_gap_rate_table(std::istream& in, GapTableKind kind) {
    GapRateTable table;
    table.kind = kind;
    std::string line;
    if (!std::getline(in, line)) throw io_error("gap table: empty input");
    auto strip = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        const auto b = s.find_last_not_of(" \t\r");
        return (a == std::string::npos) ? std::string{} : s.substr(a, b - a + 1);
    };
    {
        std::istringstream hs(line);
        std::string c1, c2;
        std::getline(hs, c1, ',');
        std::getline(hs, c2);
        if (strip(c1) != "gap_nm" || strip(c2) != "rate_ghz")
            throw io_error("gap table: expected header 'gap_nm, rate_ghz', got '" + line + "'");
    }
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (strip(line).empty()) continue;
        std::istringstream ls(line);
        std::string c1, c2;
        std::getline(ls, c1, ',');
        std::getline(ls, c2);
        try {
            const double gap_nm = std::stod(strip(c1));
            const double rate_ghz = std::stod(strip(c2));
            table.rows.push_back({gap_nm * 1e-9, rate_ghz * 2.0 * M_PI * 1e9});
        } catch (const std::exception&) {
            throw io_error("gap table: malformed row at line " + std::to_string(lineno));
        }
    }
    table.validate();
    return table;
}

// Forward lookup: rate at a gap inside the table span.
inline double lookup_rate(const GapRateTable& table, double gap, bool log_interp = true) {
    table.validate();
    const auto& r = table.rows;
    if (gap < r.front().gap || gap > r.back().gap)
        throw validation_error("lookup_rate: gap outside table span");
    std::size_t i = 0;
    while (i + 2 < r.size() && gap > r[i + 1].gap) ++i;
    const double w = (gap - r[i].gap) / (r[i + 1].gap - r[i].gap);
    if (log_interp)
        return std::exp((1.0 - w) * std::log(r[i].rate) + w * std::log(r[i + 1].rate));
    return (1.0 - w) * r[i].rate + w * r[i + 1].rate;
}

struct GapSolution {
    double gap = 0.0;
    GapRateRow lower;  // bracketing rows, for traceability
    GapRateRow upper;
};

// Invert the table: gap producing target_rate. Rates decrease with gap.
inline GapSolution solve_gap(const GapRateTable& table, double target_rate,
                             bool log_interp = true) {
    table.validate();
    const auto& r = table.rows;
    if (!(target_rate <= r.front().rate) || !(target_rate >= r.back().rate)) {
        std::ostringstream msg;
        msg << "solve_gap: target rate " << target_rate << " outside achievable ["
            << r.back().rate << ", " << r.front().rate << "] rad/s";
        throw validation_error(msg.str());
    }
    std::size_t i = 0;
    while (i + 2 < r.size() && target_rate < r[i + 1].rate) ++i;
    GapSolution sol;
    sol.lower = r[i];
    sol.upper = r[i + 1];
    double w;
    if (log_interp)
        w = (std::log(r[i].rate) - std::log(target_rate)) /
            (std::log(r[i].rate) - std::log(r[i + 1].rate));
    else
        w = (r[i].rate - target_rate) / (r[i].rate - r[i + 1].rate);
    sol.gap = r[i].gap + w * (r[i + 1].gap - r[i].gap);
    return sol;
}

} // namespace qpn
