// io.hpp — deterministic text output (12 significant digits, locale
// independent), trajectory/pulse/sweep CSV, and JSON forms of the report
// types. Golden-file tests depend on byte stability here.

#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qpn/config.hpp"
#include "qpn/dynamics.hpp"
#include "qpn/metrics.hpp"
#include "qpn/optimize.hpp"
#include "qpn/transfer.hpp"

namespace qpn {

inline std::string fmt12(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

// JSON numbers round-tripped through the 12-digit form so dumps stay stable.
inline double json_num(double x) {
    const std::string s = fmt12(x);
    double out = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), out);
    return out;
}

inline nlohmann::json json_num_array(const std::vector<double>& xs) {
    nlohmann::json j = nlohmann::json::array();
    for (double x : xs) j.push_back(json_num(x));
    return j;
}

// ------------------------------- CSV: pulses --------------------------------

// Unit scaling for absolute-rate configs: times multiply by time_scale (1/g
// turns normalized time into seconds) and amplitudes by amp_scale (sqrt(g)
// keeps the pulse norm at unity).
struct UnitScale {
    double time = 1.0;
    double amplitude = 1.0;

    static UnitScale absolute(double g) { return {1.0 / g, std::sqrt(g)}; }
};

inline void write_pulse_csv(std::ostream& out, const Pulse& pulse,
                            const std::vector<Pulse>& components = {},
                            const UnitScale& scale = {}) {
    out << "t,re_e,im_e";
    for (std::size_t n = 0; n < components.size(); ++n)
        out << ",re_e" << (n + 1) << ",im_e" << (n + 1);
    out << "\n";
    for (std::size_t i = 0; i < pulse.samples.size(); ++i) {
        const cplx e = pulse.samples[i] * scale.amplitude;
        out << fmt12(pulse.grid.time_at(i) * scale.time) << ',' << fmt12(e.real()) << ','
            << fmt12(e.imag());
        for (const auto& comp : components) {
            const cplx ec = comp.samples[i] * scale.amplitude;
            out << ',' << fmt12(ec.real()) << ',' << fmt12(ec.imag());
        }
        out << "\n";
    }
}

inline Pulse read_pulse_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw io_error("pulse csv: empty input");
    // locate t, re_e, im_e columns
    std::vector<std::string> headers;
    {
        std::istringstream hs(line);
        std::string cell;
        while (std::getline(hs, cell, ',')) {
            const auto a = cell.find_first_not_of(" \t\r");
            const auto b = cell.find_last_not_of(" \t\r");
            headers.push_back(a == std::string::npos ? std::string{} : cell.substr(a, b - a + 1));
        }
    }
    std::size_t it = headers.size(), ire = headers.size(), iim = headers.size();
    for (std::size_t i = 0; i < headers.size(); ++i) {
        if (headers[i] == "t") it = i;
        if (headers[i] == "re_e") ire = i;
        if (headers[i] == "im_e") iim = i;
    }
    if (it >= headers.size() || ire >= headers.size() || iim >= headers.size())
        throw io_error("pulse csv: header must contain t, re_e, im_e");

    std::vector<double> ts;
    std::vector<cplx> es;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        std::istringstream ls(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ls, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw io_error("pulse csv: malformed number at line " + std::to_string(lineno));
            }
        }
        if (row.size() < headers.size())
            throw io_error("pulse csv: short row at line " + std::to_string(lineno));
        ts.push_back(row[it]);
        es.emplace_back(row[ire], row[iim]);
    }
    if (ts.size() < 2) throw io_error("pulse csv: needs at least two samples");
    const double dt = (ts.back() - ts.front()) / static_cast<double>(ts.size() - 1);
    if (!(dt > 0.0)) throw io_error("pulse csv: time column must increase");
    for (std::size_t i = 1; i < ts.size(); ++i) {
        const double expect = ts.front() + dt * static_cast<double>(i);
        if (std::abs(ts[i] - expect) > 1e-6 * std::max(1.0, std::abs(expect)))
            throw io_error("pulse csv: time samples are not uniform near line " +
                           std::to_string(i + 2));
    }
    return make_pulse(TimeGrid{ts.front(), ts.back(), ts.size()}, std::move(es));
}

// ----------------------------- CSV: trajectories ----------------------------

// header: t, re_c0, im_c0, re/im per ring (or per a/b mode), re_e, im_e,
// p_tls, p_waveguide_cum; full-model trajectories emit e_plus/e_minus.
inline void write_trajectory_csv(std::ostream& out, const Trajectory& traj,
                                 const UnitScale& scale = {}) {
    const bool full = traj.model_kind == ModelKind::full;
    const bool driven = !traj.drive_in_cum.empty();
    out << "t,re_c0,im_c0";
    for (std::size_t b = 1; b < traj.basis_labels.size(); ++b) {
        std::string tag = full ? traj.basis_labels[b] : "c" + std::to_string(b);
        out << ",re_" << tag << ",im_" << tag;
    }
    if (full) out << ",re_e_plus,im_e_plus,re_e_minus,im_e_minus";
    else      out << ",re_e,im_e";
    out << ",p_tls,p_waveguide_cum\n";

    for (std::size_t i = 0; i < traj.n_samples(); ++i) {
        out << fmt12(traj.grid.time_at(i) * scale.time);
        for (const auto& series : traj.amplitudes)
            out << ',' << fmt12(series[i].real()) << ',' << fmt12(series[i].imag());
        if (full)
            out << ',' << fmt12(traj.emitted_plus.samples[i].real() * scale.amplitude) << ','
                << fmt12(traj.emitted_plus.samples[i].imag() * scale.amplitude) << ','
                << fmt12(traj.emitted_minus.samples[i].real() * scale.amplitude) << ','
                << fmt12(traj.emitted_minus.samples[i].imag() * scale.amplitude);
        else
            out << ',' << fmt12(traj.emitted.samples[i].real() * scale.amplitude) << ','
                << fmt12(traj.emitted.samples[i].imag() * scale.amplitude);
        const double wg = driven ? traj.outflux_cum[i] : traj.waveguide_cum[i];
        out << ',' << fmt12(std::norm(traj.amplitudes[0][i])) << ',' << fmt12(wg) << "\n";
    }
}

// combined sender/pulse/receiver table on one time axis from t = 0 to the end
// of the receiving window (the layout used by the transfer figure); the
// receiver series starts at the delay and is interpolated onto the axis
inline void write_transfer_csv(std::ostream& out, const TransferReport& rep) {
    const Trajectory& s = rep.sender_traj;
    const Trajectory& r = rep.receiver_traj;
    const double dt = s.grid.dt();
    const std::size_t rows =
        1 + static_cast<std::size_t>(std::ceil(r.grid.t_end / dt - 1e-9));

    auto interp_pop = [](const Trajectory& traj, std::size_t series_lo, std::size_t series_hi,
                         double t) {
        if (t < traj.grid.t_start || t > traj.grid.t_end) return 0.0;
        const double x = (t - traj.grid.t_start) / traj.grid.dt();
        std::size_t k = static_cast<std::size_t>(x);
        if (k + 1 >= traj.n_samples()) k = traj.n_samples() - 2;
        const double w = x - static_cast<double>(k);
        double p0 = 0.0, p1 = 0.0;
        for (std::size_t b = series_lo; b < series_hi; ++b) {
            p0 += std::norm(traj.amplitudes[b][k]);
            p1 += std::norm(traj.amplitudes[b][k + 1]);
        }
        return p0 * (1.0 - w) + p1 * w;
    };

    out << "t,p_tls_sender,p_rings_sender,pulse_abs2,p_tls_receiver,p_rings_receiver\n";
    for (std::size_t i = 0; i < rows; ++i) {
        const double t = dt * static_cast<double>(i);
        const double ps = interp_pop(s, 0, 1, t);
        const double rs = interp_pop(s, 1, s.amplitudes.size(), t);
        const double tp = t - rep.delay;
        double pulse2 = 0.0;
        if (tp >= rep.emitted.grid.t_start && tp <= rep.emitted.grid.t_end) {
            const double x = (tp - rep.emitted.grid.t_start) / rep.emitted.grid.dt();
            std::size_t k = static_cast<std::size_t>(x);
            if (k + 1 >= rep.emitted.samples.size()) k = rep.emitted.samples.size() - 2;
            const double w = x - static_cast<double>(k);
            const cplx e = rep.emitted.samples[k] * (1.0 - w) + rep.emitted.samples[k + 1] * w;
            pulse2 = std::norm(e);
        }
        out << fmt12(t) << ',' << fmt12(ps) << ',' << fmt12(rs) << ',' << fmt12(pulse2) << ','
            << fmt12(interp_pop(r, 0, 1, t)) << ','
            << fmt12(interp_pop(r, 1, r.amplitudes.size(), t)) << "\n";
    }
}

// ------------------------------- CSV: sweeps ---------------------------------

inline std::vector<std::string> sweep_param_names(std::size_t n_rings) {
    std::vector<std::string> names;
    for (std::size_t i = 1; i < n_rings; ++i)
        names.push_back("J" + std::to_string(i) + std::to_string(i + 1));
    names.push_back("kappa");
    return names;
}

inline void write_sweep_csv(std::ostream& out, const SweepResult& res) {
    const auto names = sweep_param_names(res.spec.n_rings);
    for (const auto& n : names) out << n << ',';
    out << "beta\n";
    for (std::size_t i = 0; i < res.beta.size(); ++i) {
        const auto p = res.spec.params_at(i);
        for (double v : p) out << fmt12(v) << ',';
        out << fmt12(res.beta[i]) << "\n";
    }
}

// --------------------------------- JSON -------------------------------------

inline nlohmann::json to_json(const EigenDecomposition& eig) {
    std::vector<double> wr, wi, ar, ai;
    for (const cplx& w : eig.eigenvalues) { wr.push_back(w.real()); wi.push_back(w.imag()); }
    for (const cplx& a : eig.modal_amplitudes) { ar.push_back(a.real()); ai.push_back(a.imag()); }
    return nlohmann::json{{"omega_re", json_num_array(wr)},
                          {"omega_im", json_num_array(wi)},
                          {"alpha_re", json_num_array(ar)},
                          {"alpha_im", json_num_array(ai)}};
}

inline nlohmann::json to_json(const SymmetryResult& res) {
    return nlohmann::json{{"beta", json_num(res.beta)},
                          {"t0_star", json_num(res.t0_star)},
                          {"pulse_norm", json_num(res.pulse_norm)}};
}

inline nlohmann::json to_json(const OptimumReport& rep) {
    nlohmann::json trace = nlohmann::json::array();
    for (const auto& tp : rep.trace)
        trace.push_back({{"eval", tp.eval},
                         {"params", json_num_array(tp.params)},
                         {"beta", json_num(tp.beta)}});
    std::vector<double> wr, wi;
    for (const cplx& w : rep.eigenvalues) { wr.push_back(w.real()); wi.push_back(w.imag()); }
    return nlohmann::json{{"best_params", json_num_array(rep.best_params)},
                          {"best_beta", json_num(rep.best_beta)},
                          {"omega_re", json_num_array(wr)},
                          {"omega_im", json_num_array(wi)},
                          {"n_evals", rep.n_evals},
                          {"converged", rep.converged},
                          {"restarted", rep.restarted},
                          {"trace", trace},
                          {"warnings", rep.warnings}};
}

inline nlohmann::json to_json(const LossBudget& b) {
    return nlohmann::json{{"sender_gamma0", json_num(b.sender_gamma0)},
                          {"sender_gammac", json_num(b.sender_gammac)},
                          {"sender_residual", json_num(b.sender_residual)},
                          {"receiver_gamma0", json_num(b.receiver_gamma0)},
                          {"receiver_gammac", json_num(b.receiver_gammac)},
                          {"receiver_rings", json_num(b.receiver_rings)},
                          {"receiver_reflected", json_num(b.receiver_reflected)},
                          {"pulse_in_flight", json_num(b.pulse_in_flight)}};
}

inline nlohmann::json to_json(const TransferReport& rep) {
    return nlohmann::json{{"sender", to_json(rep.sender)},
                          {"receiver", to_json(rep.receiver)},
                          {"delay", json_num(rep.delay)},
                          {"beta", json_num(rep.beta)},
                          {"beta_t0", json_num(rep.beta_t0)},
                          {"F", json_num(rep.f)},
                          {"t_peak", json_num(rep.t_peak)},
                          {"emitted_norm", json_num(rep.emitted.norm)},
                          {"loss_budget", to_json(rep.budget)},
                          {"warnings", rep.warnings}};
}

inline void write_text_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open for writing: " + path);
    out << contents;
    if (!out) throw io_error("write failed: " + path);
}

} // namespace qpn
