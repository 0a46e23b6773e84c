// spectral.hpp — eigenmodes of the effective Hamiltonian and the analytic
// emitted pulse e(t) = sum_n alpha_n exp(-i Omega_n t).
//
// The modal amplitude alpha_n is the residue weight
//   alpha_n = -i sqrt(2 kappa) g prod(J) / prod_{m != n} (Omega_n - Omega_m),
// valid for the ideal (lossless, resonant, no backscatter) reduced model with
// a non-degenerate spectrum; degenerate spectra raise and callers fall back to
// ODE integration.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

#include "qpn/config.hpp"
#include "qpn/eigensolver.hpp"
#include "qpn/grid.hpp"
#include "qpn/hamiltonian.hpp"

namespace qpn {

struct EigenDecomposition {
    std::vector<cplx> eigenvalues;       // sorted: descending re, ties descending im
    CMat eigenvectors;                   // columns follow eigenvalue order
    std::vector<cplx> modal_amplitudes;  // empty until modal_amplitudes() fills it
    double reconstruction_error = 0.0;
    double vector_condition = 0.0;
};

inline EigenDecomposition eigendecompose(const EffectiveHamiltonian& h) {
    DenseEigen raw = eigen_decompose(h.entries);
    if (raw.reconstruction_error > 1e-6) {
        std::ostringstream msg;
        msg << "eigendecompose: eigenvectors defective beyond tolerance"
            << " (reconstruction error " << raw.reconstruction_error
            << ", condition estimate " << raw.vector_condition << ")";
        throw numerical_error(msg.str());
    }

    const std::size_t n = raw.values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (raw.values[a].real() != raw.values[b].real())
            return raw.values[a].real() > raw.values[b].real();
        return raw.values[a].imag() > raw.values[b].imag();
    });

    EigenDecomposition out;
    out.eigenvalues.resize(n);
    out.eigenvectors = CMat(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        out.eigenvalues[k] = raw.values[order[k]];
        for (std::size_t r = 0; r < n; ++r) out.eigenvectors(r, k) = raw.vectors(r, order[k]);
    }
    out.reconstruction_error = raw.reconstruction_error;
    out.vector_condition = raw.vector_condition;
    return out;
}

inline double min_eigenvalue_separation(const std::vector<cplx>& vals) {
    double sep = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < vals.size(); ++i)
        for (std::size_t j = i + 1; j < vals.size(); ++j)
            sep = std::min(sep, std::abs(vals[i] - vals[j]));
    return sep;
}

inline EigenDecomposition modal_amplitudes(const NodeConfig& config, const EigenDecomposition& eig) {
    config.validate();
    if (!config.ideal())
        throw validation_error(
            "modal_amplitudes: residue formula requires an ideal (lossless, resonant, "
            "no-backscatter) config");
    const NodeConfig c = config.normalized();
    if (eig.eigenvalues.size() != c.n_rings + 1)
        throw validation_error("modal_amplitudes: decomposition size does not match config");

    const double sep = min_eigenvalue_separation(eig.eigenvalues);
    if (!(sep > 1e-8)) {
        std::ostringstream msg;
        msg << "modal_amplitudes: degenerate spectrum (min separation " << sep << ")";
        throw degenerate_spectrum_error(msg.str());
    }

    double prod_j = 1.0;  // empty product covers N = 1
    for (double j : c.j_rates) prod_j *= j;
    const cplx front = cplx{0.0, -1.0} * std::sqrt(2.0 * c.kappa) * c.g * prod_j;

    EigenDecomposition out = eig;
    out.modal_amplitudes.resize(eig.eigenvalues.size());
    for (std::size_t n = 0; n < eig.eigenvalues.size(); ++n) {
        cplx denom{1.0, 0.0};
        for (std::size_t m = 0; m < eig.eigenvalues.size(); ++m)
            if (m != n) denom *= eig.eigenvalues[n] - eig.eigenvalues[m];
        out.modal_amplitudes[n] = front / denom;
    }
    return out;
}

// Residual norm of the analytic pulse beyond time T:
//   int_T^inf |e|^2 dt = sum_{n,m} a_n conj(a_m) exp(-i w T) / (i w),
//   w = Omega_n - conj(Omega_m), Im w < 0 for a passive node.
inline double analytic_tail_norm(const EigenDecomposition& eig, double t_from) {
    cplx acc{};
    const auto& a = eig.modal_amplitudes;
    const auto& om = eig.eigenvalues;
    for (std::size_t n = 0; n < a.size(); ++n)
        for (std::size_t m = 0; m < a.size(); ++m) {
            const cplx w = om[n] - std::conj(om[m]);
            acc += a[n] * std::conj(a[m]) * std::exp(cplx{0.0, -1.0} * w * t_from) /
                   (cplx{0.0, 1.0} * w);
        }
    return acc.real();
}

// Window long enough that the analytic tail norm drops below tail_target.
inline double recommended_emission_window(const EigenDecomposition& eig, double t_min = 20.0,
                                          double tail_target = 1e-9, double t_cap = 600.0) {
    double slowest = std::numeric_limits<double>::infinity();
    for (const cplx& om : eig.eigenvalues) slowest = std::min(slowest, -om.imag());
    double t = t_min;
    if (slowest > 0.0) t = std::max(t_min, 0.5 * std::log(1.0 / tail_target) / slowest);
    if (!eig.modal_amplitudes.empty()) {
        while (t < t_cap && analytic_tail_norm(eig, t) > tail_target) t *= 1.25;
    }
    return std::min(t, t_cap);
}

inline std::vector<cplx> sample_modal_sum(const std::vector<cplx>& amplitudes,
                                          const std::vector<cplx>& omegas, const TimeGrid& grid) {
    std::vector<cplx> s(grid.n_samples);
    for (std::size_t i = 0; i < grid.n_samples; ++i) {
        const double t = grid.time_at(i);
        cplx acc{};
        for (std::size_t n = 0; n < amplitudes.size(); ++n)
            acc += amplitudes[n] * std::exp(cplx{0.0, -1.0} * omegas[n] * t);
        s[i] = acc;
    }
    return s;
}

struct EmissionModes {
    EigenDecomposition eig;
    Pulse pulse;                   // e(t)
    std::vector<Pulse> components; // e_n(t) = alpha_n exp(-i Omega_n t)
};

inline EmissionModes analytic_emission(const NodeConfig& config, const TimeGrid& grid,
                                       bool with_components = true) {
    grid.validate();
    EigenDecomposition eig =
        modal_amplitudes(config, eigendecompose(build_reduced_hamiltonian(config)));
    EmissionModes out;
    out.pulse = make_pulse(grid, sample_modal_sum(eig.modal_amplitudes, eig.eigenvalues, grid));
    if (with_components) {
        for (std::size_t n = 0; n < eig.eigenvalues.size(); ++n) {
            out.components.push_back(make_pulse(
                grid, sample_modal_sum({eig.modal_amplitudes[n]}, {eig.eigenvalues[n]}, grid)));
        }
    }
    out.eig = std::move(eig);
    return out;
}

} // namespace qpn
