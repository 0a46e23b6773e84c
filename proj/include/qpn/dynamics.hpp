// dynamics.hpp — time evolution of the single-excitation amplitude vector:
// emission (TLS initially excited, no drive) and receiving (driven through the
// last ring), for both the reduced and the full counter-propagating model.
//
// Probability bookkeeping (waveguide flux, drive influx, reflected outflux,
// and the Gamma_0 / Gamma_c leaks) rides along as extra quadrature states of
// the integrator, so balance checks hold to integrator accuracy rather than
// output-grid trapezoid accuracy.

#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qpn/config.hpp"
#include "qpn/grid.hpp"
#include "qpn/hamiltonian.hpp"
#include "qpn/ode.hpp"

namespace qpn {

// Which whispering-gallery mode of ring N an incoming pulse couples to.
// A directional drive enters through the co-propagating mode only (forward ->
// b_N, backward -> a_N) and half its power pumps the antisymmetric chain the
// TLS never sees; the paper's single effective channel is the symmetric
// combination, which reproduces the reduced model at h = 0.
enum class DriveDirection { symmetric, forward, backward };

struct Trajectory {
    ModelKind model_kind = ModelKind::reduced;
    TimeGrid grid;
    std::vector<std::string> basis_labels;
    std::vector<std::vector<cplx>> amplitudes;  // [basis][sample]; amplitudes[0] is the TLS

    Pulse emitted;        // reduced: e = -i sqrt(kappa) c_N; full: symmetric channel
    Pulse emitted_plus;   // full model only: -i sqrt(kappa) c_{N,b}
    Pulse emitted_minus;  // full model only: -i sqrt(kappa) c_{N,a}

    // cumulative integrals, one value per output sample
    std::vector<double> waveguide_cum;  // emission flux into the waveguide
    std::vector<double> gamma0_cum;
    std::vector<double> gammac_cum;
    std::vector<double> drive_in_cum;   // driven runs: integral of |f|^2
    std::vector<double> outflux_cum;    // driven runs: reflected/re-emitted output

    std::vector<std::string> warnings;

    std::size_t n_samples() const { return grid.n_samples; }
    double system_population(std::size_t sample) const {
        double p = 0.0;
        for (const auto& series : amplitudes) p += std::norm(series[sample]);
        return p;
    }
};

namespace detail {

// Natural cubic spline through uniformly sampled complex values; zero outside
// the sample support. Linear in the sample values.
class CubicDrive {
public:
    explicit CubicDrive(const Pulse& p) : grid_(p.grid), y_(p.samples) {
        const std::size_t n = y_.size();
        m_.assign(n, cplx{});
        if (n < 3) return;
        const double h = grid_.dt();
        std::vector<cplx> rhs(n), diag(n, cplx{4.0, 0.0}), upper(n, cplx{1.0, 0.0});
        for (std::size_t i = 1; i + 1 < n; ++i)
            rhs[i] = 6.0 * (y_[i - 1] - 2.0 * y_[i] + y_[i + 1]) / (h * h);
        // Thomas solve on the interior (natural ends: m_0 = m_{n-1} = 0)
        std::vector<cplx> cp(n), dp(n);
        cp[1] = upper[1] / diag[1];
        dp[1] = rhs[1] / diag[1];
        for (std::size_t i = 2; i + 1 < n; ++i) {
            const cplx denom = diag[i] - cp[i - 1];
            cp[i] = upper[i] / denom;
            dp[i] = (rhs[i] - dp[i - 1]) / denom;
        }
        for (std::size_t i = n - 2; i >= 1; --i) {
            m_[i] = dp[i] - (i + 2 < n ? cp[i] * m_[i + 1] : cplx{});
            if (i == 1) break;
        }
    }

    cplx operator()(double t) const {
        if (t < grid_.t_start || t > grid_.t_end) return {};
        const double h = grid_.dt();
        const double x = (t - grid_.t_start) / h;
        std::size_t i = static_cast<std::size_t>(x);
        if (i + 1 >= y_.size()) i = y_.size() - 2;
        const double s = t - (grid_.t_start + h * static_cast<double>(i));
        const cplx b =
            (y_[i + 1] - y_[i]) / h - h * (2.0 * m_[i] + m_[i + 1]) / 6.0;
        const cplx c = 0.5 * m_[i];
        const cplx d = (m_[i + 1] - m_[i]) / (6.0 * h);
        return y_[i] + s * (b + s * (c + s * d));
    }

    double support_start() const { return grid_.t_start; }

private:
    TimeGrid grid_;
    std::vector<cplx> y_;
    std::vector<cplx> m_;  // second derivatives
};

struct AccLayout {
    std::size_t wg, g0, gc, din, dout, count;
};

inline AccLayout acc_layout(bool driven) {
    if (driven) return {0, 0, 1, 2, 3, 4};  // wg unused
    return {0, 1, 2, 0, 0, 3};              // din/dout unused
}

inline Trajectory integrate_node(const NodeConfig& config, const EffectiveHamiltonian& ham,
                                 const TimeGrid& grid, const std::optional<Pulse>& incoming,
                                 DriveDirection direction, const OdeOptions& opt) {
    const NodeConfig c = config.normalized();
    const std::size_t n = c.n_rings;
    const std::size_t dim = ham.dim;
    const bool full = ham.model_kind == ModelKind::full;
    const bool driven = incoming.has_value();
    const double kappa = c.kappa;
    const double sqk = std::sqrt(kappa);
    const std::size_t ia_n = n;        // a_N (also c_N of the reduced model)
    const std::size_t ib_n = 2 * n;    // b_N (full model)
    const AccLayout acc = acc_layout(driven);

    std::optional<CubicDrive> drive;
    if (driven) {
        if (incoming->norm > 1.0 + 1e-6)
            throw validation_error("evolve_driven: incoming pulse norm must be <= 1");
        drive.emplace(*incoming);
    }
    // drive weights on (a_N, b_N); reduced model uses the a slot with weight 1
    cplx wa{}, wb{};
    if (driven) {
        if (!full) {
            wa = 1.0;
        } else if (direction == DriveDirection::symmetric) {
            wa = wb = 1.0 / std::sqrt(2.0);
        } else if (direction == DriveDirection::forward) {
            wb = 1.0;
        } else {
            wa = 1.0;
        }
    }

    const CMat& m = ham.entries;
    OdeRhs rhs = [&, dim](double t, const std::vector<cplx>& y, std::vector<cplx>& dy) {
        for (std::size_t i = 0; i < dim; ++i) {
            cplx s{};
            for (std::size_t j = 0; j < dim; ++j) s += m(i, j) * y[j];
            dy[i] = cplx{0.0, -1.0} * s;
        }
        double ring_pop = 0.0;
        for (std::size_t i = 1; i < dim; ++i) ring_pop += std::norm(y[i]);
        dy[dim + acc.g0] = c.gamma0 * std::norm(y[0]);
        dy[dim + acc.gc] = c.gamma_c * ring_pop;
        if (driven) {
            const cplx f = (*drive)(t);
            if (wa != cplx{}) dy[ia_n] += cplx{0.0, -1.0} * sqk * (wa * f);
            if (wb != cplx{}) dy[ib_n] += cplx{0.0, -1.0} * sqk * (wb * f);
            const cplx out_a = wa * f - cplx{0.0, 1.0} * sqk * y[ia_n];
            dy[dim + acc.din] = std::norm(f) * (std::norm(wa) + std::norm(wb));
            double outflux = std::norm(out_a);
            if (full) {
                const cplx out_b = wb * f - cplx{0.0, 1.0} * sqk * y[ib_n];
                outflux += std::norm(out_b);
            }
            dy[dim + acc.dout] = outflux;
        } else {
            double wg = std::norm(y[ia_n]);
            if (full) wg += std::norm(y[ib_n]);
            dy[dim + acc.wg] = kappa * wg;
        }
    };

    Trajectory traj;
    traj.model_kind = ham.model_kind;
    traj.grid = grid;
    traj.basis_labels = ham.basis_labels;
    traj.amplitudes.assign(dim, std::vector<cplx>(grid.n_samples));
    traj.gamma0_cum.assign(grid.n_samples, 0.0);
    traj.gammac_cum.assign(grid.n_samples, 0.0);
    if (driven) {
        traj.drive_in_cum.assign(grid.n_samples, 0.0);
        traj.outflux_cum.assign(grid.n_samples, 0.0);
    } else {
        traj.waveguide_cum.assign(grid.n_samples, 0.0);
    }

    auto record = [&](std::size_t sample, const std::vector<cplx>& y) {
        for (std::size_t i = 0; i < dim; ++i) traj.amplitudes[i][sample] = y[i];
        traj.gamma0_cum[sample] = y[dim + acc.g0].real();
        traj.gammac_cum[sample] = y[dim + acc.gc].real();
        if (driven) {
            traj.drive_in_cum[sample] = y[dim + acc.din].real();
            traj.outflux_cum[sample] = y[dim + acc.dout].real();
        } else {
            traj.waveguide_cum[sample] = y[dim + acc.wg].real();
        }
    };

    std::vector<cplx> y0(dim + acc.count, cplx{});
    if (!driven) y0[0] = 1.0;

    std::vector<double> times(grid.n_samples);
    for (std::size_t i = 0; i < grid.n_samples; ++i) times[i] = grid.time_at(i);

    double t_begin = grid.t_start;
    std::size_t first_live = 0;
    if (driven) {
        // nothing happens before the drive arrives; skip the exact-zero stretch
        const double t_on = drive->support_start();
        if (t_on > t_begin) {
            t_begin = std::min(t_on, grid.t_end);
            while (first_live < times.size() && times[first_live] < t_begin) {
                record(first_live, y0);
                ++first_live;
            }
        }
    }
    if (t_begin < grid.t_end) {
        std::span<const double> live(times.data() + first_live, times.size() - first_live);
        integrate_dopri5(
            rhs, y0, t_begin, grid.t_end, live,
            [&](std::size_t i, const std::vector<cplx>& y) { record(first_live + i, y); }, opt);
    }

    // waveguide amplitudes
    std::vector<cplx> e(grid.n_samples);
    if (!full) {
        for (std::size_t i = 0; i < grid.n_samples; ++i)
            e[i] = cplx{0.0, -1.0} * sqk * traj.amplitudes[ia_n][i];
        traj.emitted = make_pulse(grid, std::move(e));
    } else {
        std::vector<cplx> ep(grid.n_samples), em(grid.n_samples);
        for (std::size_t i = 0; i < grid.n_samples; ++i) {
            em[i] = cplx{0.0, -1.0} * sqk * traj.amplitudes[ia_n][i];
            ep[i] = cplx{0.0, -1.0} * sqk * traj.amplitudes[ib_n][i];
            e[i] = (ep[i] + em[i]) / std::sqrt(2.0);
        }
        traj.emitted = make_pulse(grid, std::move(e));
        traj.emitted_plus = make_pulse(grid, std::move(ep));
        traj.emitted_minus = make_pulse(grid, std::move(em));
    }

    if (!driven) {
        const double residual = traj.system_population(grid.n_samples - 1);
        if (residual >= 1e-6)
            traj.warnings.push_back("emission window too short: remaining system population " +
                                    std::to_string(residual));
    }
    return traj;
}

} // namespace detail

inline Trajectory evolve_emission(const NodeConfig& config, const TimeGrid& grid,
                                  const OdeOptions& opt = {}) {
    config.validate();
    grid.validate();
    return detail::integrate_node(config, build_reduced_hamiltonian(config), grid, std::nullopt,
                                  DriveDirection::symmetric, opt);
}

inline Trajectory evolve_driven(const NodeConfig& config, const Pulse& incoming,
                                const TimeGrid& grid, const OdeOptions& opt = {}) {
    config.validate();
    grid.validate();
    return detail::integrate_node(config, build_reduced_hamiltonian(config), grid, incoming,
                                  DriveDirection::symmetric, opt);
}

inline Trajectory evolve_driven(const NodeConfig& config, const Pulse& incoming,
                                const OdeOptions& opt = {}) {
    return evolve_driven(config, incoming, incoming.grid, opt);
}

inline Trajectory evolve_full_emission(const NodeConfig& config, const TimeGrid& grid,
                                       const OdeOptions& opt = {}) {
    config.validate();
    grid.validate();
    return detail::integrate_node(config, build_full_hamiltonian(config), grid, std::nullopt,
                                  DriveDirection::symmetric, opt);
}

inline Trajectory evolve_full_driven(const NodeConfig& config, const Pulse& incoming,
                                     const TimeGrid& grid,
                                     DriveDirection direction = DriveDirection::symmetric,
                                     const OdeOptions& opt = {}) {
    config.validate();
    grid.validate();
    return detail::integrate_node(config, build_full_hamiltonian(config), grid, incoming,
                                  direction, opt);
}

// One-stop variant matching the CLI surface: emission when no pulse is given.
inline Trajectory evolve_full(const NodeConfig& config, const TimeGrid& grid,
                              const std::optional<Pulse>& incoming = std::nullopt,
                              DriveDirection direction = DriveDirection::symmetric,
                              const OdeOptions& opt = {}) {
    if (incoming) return evolve_full_driven(config, *incoming, grid, direction, opt);
    return evolve_full_emission(config, grid, opt);
}

} // namespace qpn
