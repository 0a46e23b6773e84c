// qpnode — simulate, optimize and lay out a quantum photonic node: a two-level
// emitter coupled through cascaded microrings to a waveguide.
//
// Subcommands: emit, receive, transfer, eigen, beta, optimize, sweep,
// design-g, design-gap, validate, plot. Every file-writing run finishes with a
// manifest JSON naming all outputs (the success marker). Numeric text output
// is fixed at 12 significant digits so identical inputs give identical bytes.
//
// Exit codes: 0 success, 1 validation error, 2 numerical failure, 3 I/O error.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qpn/design.hpp"
#include "qpn/dynamics.hpp"
#include "qpn/io.hpp"
#include "qpn/metrics.hpp"
#include "qpn/optimize.hpp"
#include "qpn/spectral.hpp"
#include "qpn/svg.hpp"
#include "qpn/transfer.hpp"
#include "qpn/version.hpp"

namespace {

using nlohmann::json;
using namespace qpn;

// ----------------------------- shared plumbing ------------------------------

struct ManifestWriter {
    std::string command;
    json resolved_config;
    std::vector<std::string> outputs;
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

    void add(const std::string& path) { outputs.push_back(path); }

    void write(const std::string& path, const OdeOptions& ode = {}) {
        const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
        json m{{"command", command},
               {"version", qpn::version},
               {"integrator", {{"rtol", ode.rtol}, {"atol", ode.atol}}},
               {"outputs", outputs},
               {"wall_ms", ms}};
        if (!resolved_config.is_null()) m["config"] = resolved_config;
        write_text_file(path, m.dump(2) + "\n");
    }
};

struct ConfigCli {
    std::string config_path;
    std::vector<double> j_rates, deltas, backscatter;
    double g = -1.0, kappa = -1.0, gamma0 = -1.0, gamma_c = -1.0;
    long n_rings = -1;

    void attach(CLI::App* cmd, bool required) {
        auto* opt = cmd->add_option("--config", config_path, "node config JSON file");
        if (required) opt->required();
        cmd->add_option("--n-rings", n_rings, "override: number of rings");
        cmd->add_option("--g", g, "override: TLS-ring coupling rate");
        cmd->add_option("--kappa", kappa, "override: ring-waveguide rate");
        cmd->add_option("--j-rates", j_rates, "override: ring-ring rates")->delimiter(',');
        cmd->add_option("--deltas", deltas, "override: ring detunings")->delimiter(',');
        cmd->add_option("--gamma0", gamma0, "override: TLS free-space decay");
        cmd->add_option("--gamma-c", gamma_c, "override: ring radiation loss");
        cmd->add_option("--backscatter", backscatter, "override: intra-ring cw/ccw coupling")
            ->delimiter(',');
    }

    NodeConfig resolve() const {
        NodeConfig c;
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw io_error("cannot open config: " + config_path);
            json j;
            try {
                in >> j;
            } catch (const json::exception& e) {
                throw io_error("config parse failed: " + std::string(e.what()));
            }
            c = node_config_from_json(j);
        }
        if (n_rings > 0) c.n_rings = static_cast<std::size_t>(n_rings);
        if (g > 0.0) c.g = g;
        if (kappa > 0.0) c.kappa = kappa;
        if (!j_rates.empty()) c.j_rates = j_rates;
        if (!deltas.empty()) c.deltas = deltas;
        if (gamma0 >= 0.0) c.gamma0 = gamma0;
        if (gamma_c >= 0.0) c.gamma_c = gamma_c;
        if (!backscatter.empty()) c.backscatter = backscatter;
        c.validate();
        return c;
    }
};

void emit_json(const json& j, const std::string& out_path, ManifestWriter* manifest = nullptr) {
    if (out_path.empty()) {
        std::cout << j.dump(2) << "\n";
    } else {
        write_text_file(out_path, j.dump(2) + "\n");
        if (manifest) manifest->add(out_path);
    }
}

std::size_t resolve_workers(std::size_t cli_value) {
    if (cli_value > 0) return cli_value;
    if (const char* env = std::getenv("CASCADE_NODE_WORKERS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<std::size_t>(v);
    }
    return 0;  // library picks hardware concurrency
}

// generic CSV table: header names + rows of doubles
struct CsvTable {
    std::vector<std::string> names;
    std::vector<std::vector<double>> rows;

    std::size_t column(const std::string& name) const {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == name) return i;
        throw io_error("csv: missing column '" + name + "'");
    }
};

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open: " + path);
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw io_error("empty csv: " + path);
    std::istringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) {
        const auto a = cell.find_first_not_of(" \t\r");
        const auto b = cell.find_last_not_of(" \t\r");
        t.names.push_back(a == std::string::npos ? std::string{} : cell.substr(a, b - a + 1));
    }
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        std::istringstream ls(line);
        std::vector<double> row;
        while (std::getline(ls, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw io_error(path + ": malformed number at line " + std::to_string(lineno));
            }
        }
        if (row.size() != t.names.size())
            throw io_error(path + ": ragged row at line " + std::to_string(lineno));
        t.rows.push_back(std::move(row));
    }
    if (t.rows.size() < 2) throw io_error(path + ": needs at least two data rows");
    return t;
}

// ------------------------------- subcommands --------------------------------

int cmd_emit(const NodeConfig& cfg, double window, std::size_t samples, bool force_ode,
             bool absolute, const std::string& prefix) {
    ManifestWriter manifest{"emit", to_json(cfg)};
    const TimeGrid grid{0.0, window, samples};
    const Trajectory traj = evolve_emission(cfg, grid);
    for (const auto& w : traj.warnings) std::cerr << "warning: " << w << "\n";
    const UnitScale scale = absolute ? UnitScale::absolute(cfg.g) : UnitScale{};

    std::ostringstream pulse_csv;
    if (cfg.ideal() && !force_ode) {
        const auto modes = analytic_emission(cfg, grid);
        write_pulse_csv(pulse_csv, traj.emitted, modes.components, scale);
    } else {
        write_pulse_csv(pulse_csv, traj.emitted, {}, scale);
    }
    write_text_file(prefix + "_pulse.csv", pulse_csv.str());
    manifest.add(prefix + "_pulse.csv");

    std::ostringstream traj_csv;
    write_trajectory_csv(traj_csv, traj, scale);
    write_text_file(prefix + "_trajectory.csv", traj_csv.str());
    manifest.add(prefix + "_trajectory.csv");

    const auto sym = symmetry_factor(traj.emitted);
    emit_json(json{{"beta", json_num(sym.beta)},
                   {"t0_star", json_num(sym.t0_star)},
                   {"pulse_norm", json_num(traj.emitted.norm)}},
              prefix + "_beta.json", &manifest);

    manifest.write(prefix + "_manifest.json");
    return 0;
}

int cmd_receive(const NodeConfig& cfg, const std::string& pulse_path, double window_scale,
                bool absolute, const std::string& prefix) {
    ManifestWriter manifest{"receive", to_json(cfg)};
    std::ifstream in(pulse_path);
    if (!in) throw io_error("cannot open pulse: " + pulse_path);
    Pulse incoming = read_pulse_csv(in);
    if (absolute) {
        // pulse file carries absolute time (s) and sqrt(rate)-scaled amplitude
        TimeGrid grid = incoming.grid;
        grid.t_start *= cfg.g;
        grid.t_end *= cfg.g;
        std::vector<cplx> s = std::move(incoming.samples);
        for (auto& v : s) v /= std::sqrt(cfg.g);
        incoming = make_pulse(grid, std::move(s));
    }
    const double span = incoming.grid.t_end - incoming.grid.t_start;
    const TimeGrid grid{incoming.grid.t_start, incoming.grid.t_start + window_scale * span,
                        static_cast<std::size_t>(
                            static_cast<double>(incoming.grid.n_samples) * window_scale)};
    const Trajectory traj = evolve_driven(cfg, incoming, grid);
    const PeakResult pk = success_rate(traj);

    std::ostringstream traj_csv;
    write_trajectory_csv(traj_csv, traj);
    write_text_file(prefix + "_trajectory.csv", traj_csv.str());
    manifest.add(prefix + "_trajectory.csv");
    emit_json(json{{"F", json_num(pk.value)}, {"t_peak", json_num(pk.t_peak)}},
              prefix + "_receive.json", &manifest);
    manifest.write(prefix + "_manifest.json");
    return 0;
}

int cmd_transfer(const NodeConfig& sender, const NodeConfig& receiver, double delay,
                 double window, std::size_t samples, const std::string& prefix) {
    ManifestWriter manifest{"transfer", to_json(sender)};
    TransferOptions opt;
    opt.t_emit = window;
    opt.emit_samples = samples;
    const TransferReport rep = run_transfer(sender, receiver, delay, opt);
    for (const auto& w : rep.warnings) std::cerr << "warning: " << w << "\n";

    emit_json(to_json(rep), prefix + "_report.json", &manifest);

    std::ostringstream s1, s2, s3;
    write_trajectory_csv(s1, rep.sender_traj);
    write_text_file(prefix + "_sender.csv", s1.str());
    manifest.add(prefix + "_sender.csv");
    write_trajectory_csv(s2, rep.receiver_traj);
    write_text_file(prefix + "_receiver.csv", s2.str());
    manifest.add(prefix + "_receiver.csv");
    write_transfer_csv(s3, rep);
    write_text_file(prefix + "_combined.csv", s3.str());
    manifest.add(prefix + "_combined.csv");

    manifest.write(prefix + "_manifest.json");
    std::cout << "F = " << fmt12(rep.f) << " (beta = " << fmt12(rep.beta) << ")\n";
    return 0;
}

int cmd_eigen(const NodeConfig& cfg, bool full, const std::string& out) {
    const auto ham = full ? build_full_hamiltonian(cfg) : build_reduced_hamiltonian(cfg);
    EigenDecomposition eig = eigendecompose(ham);
    if (!full && cfg.ideal()) eig = modal_amplitudes(cfg, eig);
    emit_json(to_json(eig), out);
    return 0;
}

int cmd_beta(const std::string& pulse_kind, const std::string& pulse_path, double width,
             double center, double rate, double window, std::size_t samples,
             const std::string& out) {
    Pulse pulse;
    if (pulse_kind == "file") {
        std::ifstream in(pulse_path);
        if (!in) throw io_error("cannot open pulse: " + pulse_path);
        pulse = read_pulse_csv(in);
    } else if (pulse_kind == "gaussian") {
        const TimeGrid grid{0.0, window, samples};
        pulse = gaussian_pulse(grid, center > 0.0 ? center : window / 2.0, width);
    } else if (pulse_kind == "exponential") {
        const TimeGrid grid{0.0, window, samples};
        pulse = one_sided_exponential_pulse(grid, rate, 0.0);
    } else {
        throw validation_error("beta: --pulse must be a CSV path, 'gaussian' or 'exponential'");
    }
    const SymmetryResult res = symmetry_factor(pulse);
    for (const auto& w : res.warnings) std::cerr << "warning: " << w << "\n";
    emit_json(to_json(res), out);
    return 0;
}

int cmd_optimize(std::size_t n, std::vector<double> start, std::uint64_t seed,
                 std::size_t samples, const std::string& out) {
    if (start.empty()) {
        // default starts near the known ridge
        start.assign(n, 3.0);
        start.back() = 8.0;
    }
    RefineOptions opt;
    opt.seed = seed;
    opt.objective.n_samples = samples;
    const OptimumReport rep = refine(start, n, opt);
    for (const auto& w : rep.warnings) std::cerr << "warning: " << w << "\n";
    emit_json(to_json(rep), out);
    return rep.converged ? 0 : 2;
}

int cmd_sweep(std::size_t n, const std::string& grid_spec, const std::string& ranges_spec,
              std::size_t workers, std::size_t samples, const std::string& out) {
    SweepSpec spec;
    spec.n_rings = n;
    spec.objective.n_samples = samples;

    std::vector<std::size_t> counts;
    {
        std::istringstream gs(grid_spec);
        std::string cell;
        while (std::getline(gs, cell, 'x')) counts.push_back(std::stoul(cell));
    }
    std::vector<std::pair<double, double>> bounds;
    {
        std::istringstream rs(ranges_spec);
        std::string cell;
        while (std::getline(rs, cell, ',')) {
            const auto colon = cell.find(':');
            if (colon == std::string::npos)
                throw validation_error("sweep: ranges must look like lo:hi,lo:hi,...");
            bounds.emplace_back(std::stod(cell.substr(0, colon)),
                                std::stod(cell.substr(colon + 1)));
        }
    }
    if (counts.size() != n || bounds.size() != n)
        throw validation_error("sweep: need one grid count and one range per ratio");
    for (std::size_t i = 0; i < n; ++i)
        spec.ranges.push_back({bounds[i].first, bounds[i].second, counts[i]});

    const SweepResult res = grid_sweep(spec, resolve_workers(workers));
    std::ostringstream csv;
    write_sweep_csv(csv, res);
    write_text_file(out, csv.str());

    ManifestWriter manifest{"sweep", json{}};
    manifest.add(out);
    manifest.write(out + ".manifest.json");
    return 0;
}

int cmd_design_g(double lambda_nm, double linewidth_hz, double gamma0_rad, double n_index,
                 double veff_um3, const std::string& out) {
    EmitterModeSpec spec;
    spec.lambda = lambda_nm * 1e-9;
    spec.gamma0 = gamma0_rad > 0.0 ? gamma0_rad : 2.0 * M_PI * linewidth_hz;
    spec.n_index = n_index;
    spec.v_eff = veff_um3 * 1e-18;
    const double g = coupling_g(spec);
    emit_json(json{{"g", json_num(g)},
                   {"g_over_2pi_ghz", json_num(g / (2.0 * M_PI * 1e9))},
                   {"lambda_nm", json_num(lambda_nm)},
                   {"gamma0", json_num(spec.gamma0)},
                   {"n_index", json_num(n_index)},
                   {"v_eff_um3", json_num(veff_um3)}},
              out);
    return 0;
}

int cmd_design_gap(double g, const std::string& ring_ring_path,
                   const std::string& ring_wg_path, std::vector<double> ratios, bool linear,
                   const std::string& out) {
    if (ratios.empty()) ratios = {1.88, 2.94, 7.92};
    if (ratios.size() < 2) throw validation_error("design-gap: need at least (J..., kappa) ratios");
    auto load = [](const std::string& path, GapTableKind kind) {
        std::ifstream in(path);
        if (!in) throw io_error("cannot open table: " + path);
        return read_gap_rate_table(in, kind);
    };
    const GapRateTable jt = load(ring_ring_path, GapTableKind::ring_ring);
    const GapRateTable kt = load(ring_wg_path, GapTableKind::ring_waveguide);

    json gaps = json::object();
    json rows_used = json::array();
    for (std::size_t i = 0; i + 1 < ratios.size(); ++i) {
        const auto sol = solve_gap(jt, ratios[i] * g, !linear);
        const std::string key = "j" + std::to_string(i + 1) + std::to_string(i + 2);
        gaps[key] = json_num(sol.gap * 1e9);
        rows_used.push_back({{"target", key},
                             {"gap_nm", json_num(sol.lower.gap * 1e9)},
                             {"next_gap_nm", json_num(sol.upper.gap * 1e9)}});
    }
    const auto ks = solve_gap(kt, ratios.back() * g, !linear);
    gaps["kappa"] = json_num(ks.gap * 1e9);
    rows_used.push_back({{"target", "kappa"},
                         {"gap_nm", json_num(ks.lower.gap * 1e9)},
                         {"next_gap_nm", json_num(ks.upper.gap * 1e9)}});
    emit_json(json{{"g", json_num(g)}, {"gaps", gaps}, {"table_rows_used", rows_used}}, out);
    return 0;
}

int cmd_validate(std::size_t trials, std::uint64_t seed);

int cmd_plot(const std::string& kind, const std::string& in_path, const std::string& out_path,
             double kappa_slice, std::vector<double> levels) {
    const CsvTable t = read_csv(in_path);
    std::string svg;
    if (kind == "transfer") {
        const auto it = t.column("t");
        const auto is = t.column("p_tls_sender");
        const auto ip = t.column("pulse_abs2");
        const auto ir = t.column("p_tls_receiver");
        Series sender{"sender TLS", "#1f77b4", {}, {}};
        Series pulse{"|e(t)|^2", "#2ca02c", {}, {}};
        Series receiver{"receiver TLS", "#d62728", {}, {}};
        for (const auto& row : t.rows) {
            sender.x.push_back(row[it]);
            sender.y.push_back(row[is]);
            pulse.x.push_back(row[it]);
            pulse.y.push_back(row[ip]);
            receiver.x.push_back(row[it]);
            receiver.y.push_back(row[ir]);
        }
        // region boundaries: sender done at p < 1e-3, receiver active above 1e-3
        double t_send_end = sender.x.back(), t_recv_start = sender.x.back();
        for (std::size_t i = 0; i < sender.x.size(); ++i)
            if (sender.y[i] < 1e-3) { t_send_end = sender.x[i]; break; }
        for (std::size_t i = 0; i < receiver.x.size(); ++i)
            if (receiver.y[i] > 1e-3) { t_recv_start = receiver.x[i]; break; }
        t_recv_start = std::max(t_recv_start, t_send_end);

        LinePlot plot("state transfer", "t (1/g)", "population");
        plot.add_span({sender.x.front(), t_send_end, "lightblue", "sending"});
        plot.add_span({t_send_end, t_recv_start, "lightgreen", "transport"});
        plot.add_span({t_recv_start, sender.x.back(), "mistyrose", "receiving"});
        plot.add_series(sender);
        plot.add_series(pulse);
        plot.add_series(receiver);
        svg = plot.render();
    } else if (kind == "pulse") {
        const auto it = t.column("t");
        const auto ire = t.column("re_e");
        const auto iim = t.column("im_e");
        Series re{"Re e(t)", "#1f77b4", {}, {}}, im{"Im e(t)", "#d62728", {}, {}},
            mag{"|e(t)|^2", "#2ca02c", {}, {}};
        for (const auto& row : t.rows) {
            re.x.push_back(row[it]);
            re.y.push_back(row[ire]);
            im.x.push_back(row[it]);
            im.y.push_back(row[iim]);
            mag.x.push_back(row[it]);
            mag.y.push_back(row[ire] * row[ire] + row[iim] * row[iim]);
        }
        LinePlot plot("emitted pulse", "t (1/g)", "amplitude");
        plot.add_series(re);
        plot.add_series(im);
        plot.add_series(mag);
        svg = plot.render();
    } else if (kind == "sweep-slice") {
        if (levels.empty()) levels = {0.9, 0.97, 0.99};
        const auto ij1 = t.column("J12");
        const auto ij2 = t.column("J23");
        const auto ik = t.column("kappa");
        const auto ib = t.column("beta");
        // nearest available kappa value
        double best_k = t.rows[0][ik];
        for (const auto& row : t.rows)
            if (std::abs(row[ik] - kappa_slice) < std::abs(best_k - kappa_slice))
                best_k = row[ik];
        std::vector<double> xs, ys;
        for (const auto& row : t.rows) {
            if (row[ik] != best_k) continue;
            xs.push_back(row[ij1]);
            ys.push_back(row[ij2]);
        }
        std::sort(xs.begin(), xs.end());
        xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
        std::sort(ys.begin(), ys.end());
        ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
        std::vector<double> field(xs.size() * ys.size(), 0.0);
        auto find_idx = [](const std::vector<double>& v, double x) {
            std::size_t best = 0;
            for (std::size_t i = 0; i < v.size(); ++i)
                if (std::abs(v[i] - x) < std::abs(v[best] - x)) best = i;
            return best;
        };
        for (const auto& row : t.rows) {
            if (row[ik] != best_k) continue;
            field[find_idx(ys, row[ij2]) * xs.size() + find_idx(xs, row[ij1])] = row[ib];
        }
        svg = render_contour_svg(xs, ys, field, levels,
                                 "beta at kappa/g = " + fmt12(best_k), "J12/g", "J23/g");
    } else {
        throw validation_error("plot: --kind must be transfer, pulse, or sweep-slice");
    }
    write_text_file(out_path, svg);
    return 0;
}

// quick invariant run over random ideal configs; exits nonzero on any failure
int cmd_validate(std::size_t trials, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    bool ok = true;
    auto report = [&](const std::string& name, bool pass, double worst) {
        std::cout << (pass ? "[PASS] " : "[FAIL] ") << name << " (worst " << worst << ")\n";
        ok = ok && pass;
    };

    double worst_balance = 0.0, worst_pulse = 0.0, worst_residue = 0.0, worst_pair = 0.0,
           worst_equiv = 0.0;
    std::uniform_real_distribution<double> logu(std::log(0.4), std::log(8.0));
    for (std::size_t n = 1; n <= 3; ++n) {
        for (std::size_t trial = 0; trial < trials; ++trial) {
            NodeConfig c;
            c.n_rings = n;
            c.g = 1.0;
            for (std::size_t i = 0; i + 1 < n; ++i) c.j_rates.push_back(std::exp(logu(rng)));
            c.kappa = std::exp(logu(rng)) + 0.4;
            EigenDecomposition eig;
            try {
                eig = modal_amplitudes(c, eigendecompose(build_reduced_hamiltonian(c)));
            } catch (const degenerate_spectrum_error&) {
                continue;
            }
            const double window = recommended_emission_window(eig);
            const TimeGrid grid{0.0, window, 512};
            const auto traj = evolve_emission(c, grid);
            for (std::size_t i = 0; i < grid.n_samples; ++i) {
                const double bal = traj.system_population(i) + traj.waveguide_cum[i] - 1.0;
                worst_balance = std::max(worst_balance, std::abs(bal));
            }
            const auto analytic = sample_modal_sum(eig.modal_amplitudes, eig.eigenvalues, grid);
            for (std::size_t i = 0; i < grid.n_samples; ++i)
                worst_pulse =
                    std::max(worst_pulse, std::abs(analytic[i] - traj.emitted.samples[i]));
            double amax = 0.0, wmax = 0.0;
            for (const auto& a : eig.modal_amplitudes) amax = std::max(amax, std::abs(a));
            for (const auto& w : eig.eigenvalues) wmax = std::max(wmax, std::abs(w));
            for (std::size_t p = 0; p < n; ++p) {
                cplx s{};
                for (std::size_t k = 0; k < eig.eigenvalues.size(); ++k)
                    s += eig.modal_amplitudes[k] * std::pow(eig.eigenvalues[k], double(p));
                worst_residue =
                    std::max(worst_residue, std::abs(s) / (amax * std::pow(wmax, double(p))));
            }
            for (const auto& w : eig.eigenvalues) {
                double best = 1e9;
                for (const auto& v : eig.eigenvalues)
                    best = std::min(best, std::abs(v + std::conj(w)));
                worst_pair = std::max(worst_pair, best);
            }
            const auto full = evolve_full_emission(c, grid);
            for (std::size_t r = 1; r <= n; ++r)
                for (std::size_t i = 0; i < grid.n_samples; ++i)
                    worst_equiv = std::max(
                        worst_equiv, std::abs(std::sqrt(2.0) * full.amplitudes[r][i] -
                                              traj.amplitudes[r][i]));
        }
    }
    report("probability balance <= 1e-8", worst_balance <= 1e-8, worst_balance);
    report("analytic vs integrated pulse <= 1e-6", worst_pulse <= 1e-6, worst_pulse);
    report("residue sum rules <= 1e-8", worst_residue <= 1e-8, worst_residue);
    report("spectral pairing <= 1e-9", worst_pair <= 1e-9, worst_pair);
    report("full/reduced equivalence <= 1e-8", worst_equiv <= 1e-8, worst_equiv);

    {
        const TimeGrid grid{0.0, 20.0, 4096};
        const double b = symmetry_factor(gaussian_pulse(grid, 10.0, 1.0)).beta;
        report("beta(gaussian) = 1 +- 1e-6", std::abs(b - 1.0) <= 1e-6, std::abs(b - 1.0));
    }
    {
        const TimeGrid grid{0.0, 40.0, 1 << 15};
        const double b = symmetry_factor(one_sided_exponential_pulse(grid, 1.0)).beta;
        const double expect = 4.0 / (M_E * M_E);
        report("beta(one-sided exp) = 4/e^2 +- 1e-4", std::abs(b - expect) <= 1e-4,
               std::abs(b - expect));
    }
    {
        NodeConfig c;
        c.n_rings = 3;
        c.j_rates = {1.88, 2.94};
        c.kappa = 7.92;
        const TimeGrid grid{0.0, 25.0, 4096};
        const auto emitted = evolve_emission(c, grid).emitted;
        std::vector<cplx> rev(grid.n_samples);
        for (std::size_t i = 0; i < grid.n_samples; ++i)
            rev[i] = std::conj(emitted.samples[grid.n_samples - 1 - i]);
        const double f =
            success_rate(evolve_driven(c, make_pulse(grid, std::move(rev)))).value;
        report("time-reversed self drive F >= 0.999", f >= 0.999, f);
    }
    return ok ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum photonic node simulator"};
    app.set_version_flag("--version", qpn::version);
    app.require_subcommand(1);

    // emit
    auto* emit = app.add_subcommand("emit", "emission pulse, eigenmode components, trajectory");
    ConfigCli emit_cfg;
    emit_cfg.attach(emit, true);
    double emit_window = 20.0;
    std::size_t emit_samples = 4096;
    bool emit_force_ode = false, emit_absolute = false;
    std::string emit_prefix = "emit";
    emit->add_option("--window", emit_window, "emission window in 1/g");
    emit->add_option("--samples", emit_samples, "output samples");
    emit->add_flag("--ode", emit_force_ode, "skip the eigenmode path");
    emit->add_flag("--absolute", emit_absolute,
                   "write CSV time in seconds and amplitude in 1/sqrt(s) using g");
    emit->add_option("--out-prefix", emit_prefix, "output file prefix");

    // receive
    auto* receive = app.add_subcommand("receive", "drive a node with a pulse CSV");
    ConfigCli recv_cfg;
    recv_cfg.attach(receive, true);
    std::string recv_pulse;
    double recv_scale = 2.0;
    bool recv_absolute = false;
    std::string recv_prefix = "receive";
    receive->add_option("--pulse", recv_pulse, "incoming pulse CSV")->required();
    receive->add_option("--window-scale", recv_scale, "output window / pulse window");
    receive->add_flag("--absolute", recv_absolute, "pulse CSV uses absolute units");
    receive->add_option("--out-prefix", recv_prefix, "output file prefix");

    // transfer
    auto* transfer = app.add_subcommand("transfer", "full sender -> waveguide -> receiver run");
    ConfigCli tr_cfg;
    tr_cfg.attach(transfer, true);
    std::string tr_receiver_path;
    double tr_delay = 5.0, tr_window = 20.0;
    std::size_t tr_samples = 4096;
    std::string tr_prefix = "transfer";
    transfer->add_option("--receiver-config", tr_receiver_path,
                         "receiver config JSON (defaults to the sender)");
    transfer->add_option("--delay", tr_delay, "waveguide delay in 1/g");
    transfer->add_option("--window", tr_window, "per-node window in 1/g");
    transfer->add_option("--samples", tr_samples, "samples per node window");
    transfer->add_option("--out-prefix", tr_prefix, "output file prefix");

    // eigen
    auto* eigen = app.add_subcommand("eigen", "eigenvalues and modal amplitudes");
    ConfigCli eig_cfg;
    eig_cfg.attach(eigen, true);
    bool eig_full = false;
    std::string eig_out;
    eigen->add_flag("--full", eig_full, "use the full counter-propagating model");
    eigen->add_option("--out", eig_out, "write JSON here instead of stdout");

    // beta
    auto* beta = app.add_subcommand("beta", "time-symmetry factor of a pulse");
    std::string beta_pulse, beta_out;
    double beta_width = 1.0, beta_center = -1.0, beta_rate = 1.0, beta_window = 20.0;
    std::size_t beta_samples = 4096;
    beta->add_option("--pulse", beta_pulse, "pulse CSV path, 'gaussian', or 'exponential'")
        ->required();
    beta->add_option("--width", beta_width, "gaussian width");
    beta->add_option("--center", beta_center, "gaussian center (default mid-window)");
    beta->add_option("--rate", beta_rate, "exponential decay rate");
    beta->add_option("--window", beta_window, "synthetic pulse window");
    beta->add_option("--samples", beta_samples, "synthetic pulse samples");
    beta->add_option("--out", beta_out, "write JSON here instead of stdout");

    // optimize
    auto* optimize = app.add_subcommand("optimize", "Nelder-Mead refinement of beta");
    std::size_t opt_n = 3;
    std::vector<double> opt_start;
    std::uint64_t opt_seed = 0;
    std::size_t opt_samples = 2048;
    std::string opt_out;
    optimize->add_option("--n", opt_n, "number of rings");
    optimize->add_option("--start", opt_start, "start ratios J...,kappa")->delimiter(',');
    optimize->add_option("--seed", opt_seed, "seed for restart perturbations");
    optimize->add_option("--samples", opt_samples, "pulse samples per evaluation");
    optimize->add_option("--out", opt_out, "write report JSON here instead of stdout");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "beta over a grid of coupling ratios");
    std::size_t sw_n = 3, sw_workers = 0, sw_samples = 1024;
    std::string sw_grid = "40x40x40", sw_ranges = "0.5:5,0.5:5,2:14", sw_out = "sweep.csv";
    sweep->add_option("--n", sw_n, "number of rings");
    sweep->add_option("--grid", sw_grid, "points per axis, e.g. 40x40x40");
    sweep->add_option("--ranges", sw_ranges, "lo:hi per axis, comma separated");
    sweep->add_option("--workers", sw_workers, "worker threads (or CASCADE_NODE_WORKERS)");
    sweep->add_option("--samples", sw_samples, "pulse samples per evaluation");
    sweep->add_option("--out", sw_out, "output CSV");

    // design-g
    auto* dg = app.add_subcommand("design-g", "emitter-ring coupling from mode parameters");
    double dg_lambda = 785.0, dg_linewidth = 30e6, dg_gamma0 = -1.0, dg_n = 1.8, dg_veff = 12.0;
    std::string dg_out;
    dg->add_option("--lambda-nm", dg_lambda, "vacuum wavelength in nm");
    dg->add_option("--linewidth-hz", dg_linewidth, "natural linewidth as ordinary frequency");
    dg->add_option("--gamma0-rad", dg_gamma0, "natural linewidth as angular rate (overrides)");
    dg->add_option("--n-index", dg_n, "refractive index");
    dg->add_option("--veff-um3", dg_veff, "effective mode volume in um^3");
    dg->add_option("--out", dg_out, "write JSON here instead of stdout");

    // design-gap
    auto* dgap = app.add_subcommand("design-gap", "fabrication gaps from rate tables");
    double dgap_g = 0.0;
    std::string dgap_jj, dgap_kw, dgap_out;
    std::vector<double> dgap_ratios;
    bool dgap_linear = false;
    dgap->add_option("--g", dgap_g, "TLS-ring coupling in rad/s")->required();
    dgap->add_option("--ring-ring", dgap_jj, "gap_nm,rate_ghz CSV for ring-ring J")->required();
    dgap->add_option("--ring-waveguide", dgap_kw, "gap_nm,rate_ghz CSV for kappa")->required();
    dgap->add_option("--ratios", dgap_ratios, "target ratios J.../g, kappa/g")->delimiter(',');
    dgap->add_flag("--linear", dgap_linear, "linear instead of log-linear interpolation");
    dgap->add_option("--out", dgap_out, "write JSON here instead of stdout");

    // validate
    auto* validate = app.add_subcommand("validate", "run the invariant suite");
    std::size_t val_trials = 12;
    std::uint64_t val_seed = 1;
    validate->add_option("--trials", val_trials, "random configs per ring count");
    validate->add_option("--seed", val_seed, "random seed");

    // plot
    auto* plot = app.add_subcommand("plot", "render SVG figures from CSV data");
    std::string plot_kind, plot_in, plot_out = "plot.svg";
    double plot_kappa = 7.92;
    std::vector<double> plot_levels;
    plot->add_option("--kind", plot_kind, "transfer | pulse | sweep-slice")->required();
    plot->add_option("--in", plot_in, "input CSV")->required();
    plot->add_option("--out", plot_out, "output SVG");
    plot->add_option("--kappa", plot_kappa, "kappa slice for sweep plots");
    plot->add_option("--levels", plot_levels, "contour levels")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);  // prints usage or version text
        return code == 0 ? 0 : 1;
    }

    try {
        if (*emit)
            return cmd_emit(emit_cfg.resolve(), emit_window, emit_samples, emit_force_ode,
                            emit_absolute, emit_prefix);
        if (*receive)
            return cmd_receive(recv_cfg.resolve(), recv_pulse, recv_scale, recv_absolute,
                               recv_prefix);
        if (*transfer) {
            const NodeConfig sender = tr_cfg.resolve();
            NodeConfig receiver = sender;
            if (!tr_receiver_path.empty()) {
                ConfigCli rc;
                rc.config_path = tr_receiver_path;
                receiver = rc.resolve();
            }
            return cmd_transfer(sender, receiver, tr_delay, tr_window, tr_samples, tr_prefix);
        }
        if (*eigen) return cmd_eigen(eig_cfg.resolve(), eig_full, eig_out);
        if (*beta) {
            const bool synthetic = beta_pulse == "gaussian" || beta_pulse == "exponential";
            return cmd_beta(synthetic ? beta_pulse : "file", beta_pulse, beta_width, beta_center,
                            beta_rate, beta_window, beta_samples, beta_out);
        }
        if (*optimize) return cmd_optimize(opt_n, opt_start, opt_seed, opt_samples, opt_out);
        if (*sweep) return cmd_sweep(sw_n, sw_grid, sw_ranges, sw_workers, sw_samples, sw_out);
        if (*dg) return cmd_design_g(dg_lambda, dg_linewidth, dg_gamma0, dg_n, dg_veff, dg_out);
        if (*dgap)
            return cmd_design_gap(dgap_g, dgap_jj, dgap_kw, dgap_ratios, dgap_linear, dgap_out);
        if (*validate) return cmd_validate(val_trials, val_seed);
        if (*plot) return cmd_plot(plot_kind, plot_in, plot_out, plot_kappa, plot_levels);
    } catch (const validation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const numerical_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const io_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
