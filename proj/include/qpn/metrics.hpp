// metrics.hpp — pulse-shape and transfer figures of merit.
//
// beta = max_t0 ( int |e(t) e(2 t0 - t)| dt )^2 on the unit-normalized pulse:
// 1 exactly for a time-symmetric envelope. F = max_t |c_0(t)|^2 on a driven
// trajectory. Both use the full sampled window.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "qpn/dynamics.hpp"
#include "qpn/grid.hpp"

namespace qpn {

struct SymmetryResult {
    double beta = 0.0;
    double t0_star = 0.0;    // optimal reflection center
    bool normalized = true;  // beta is evaluated on the unit-normalized pulse
    double pulse_norm = 0.0;
    std::vector<std::string> warnings;
};

namespace detail {

// Mirror overlap S(t0) = int m(t) m(2 t0 - t) dt for an arbitrary center.
// Composite trapezoid over the overlap of the window with its reflection,
// reflected samples linearly interpolated; the partial cells at the overlap
// boundaries are integrated explicitly so pulses with hard edges do not pick
// up a first-order sampling artifact.
inline double mirror_overlap(const TimeGrid& grid, const std::vector<double>& m, double t0) {
    const double lo = grid.t_start, hi = grid.t_end;
    const double a = std::max(lo, 2.0 * t0 - hi);
    const double b = std::min(hi, 2.0 * t0 - lo);
    if (!(b > a)) return 0.0;
    const double dt = grid.dt();
    const std::size_t n = m.size();

    auto interp = [&](double t) -> double {
        if (t < lo || t > hi) return 0.0;
        const double x = (t - lo) / dt;
        std::size_t i = static_cast<std::size_t>(x);
        if (i + 1 >= n) i = n - 2;
        const double w = x - static_cast<double>(i);
        return m[i] * (1.0 - w) + m[i + 1] * w;
    };
    auto p = [&](double t) { return interp(t) * interp(2.0 * t0 - t); };

    const double xa = (a - lo) / dt, xb = (b - lo) / dt;
    std::size_t ia = static_cast<std::size_t>(std::ceil(xa - 1e-12));
    std::size_t ib = static_cast<std::size_t>(std::floor(xb + 1e-12));
    ia = std::min(ia, n - 1);
    ib = std::min(ib, n - 1);
    if (ia > ib || grid.time_at(ia) < a || grid.time_at(ib) > b)
        return 0.5 * (b - a) * (p(a) + p(b));  // inside one cell
    const double ta = grid.time_at(ia), tb = grid.time_at(ib);
    if (ia == ib)
        return 0.5 * (ta - a) * (p(a) + p(ta)) + 0.5 * (b - ta) * (p(b) + p(ta));

    double acc = 0.0;
    for (std::size_t j = ia; j <= ib; ++j) {
        const double tw = (j == ia || j == ib) ? 0.5 : 1.0;
        acc += tw * m[j] * interp(2.0 * t0 - grid.time_at(j));
    }
    acc *= dt;
    if (ta > a) acc += 0.5 * (ta - a) * (p(a) + p(ta));
    if (b > tb) acc += 0.5 * (b - tb) * (p(b) + p(tb));
    return acc;
}

// S at a grid center t_k: the reflection lands exactly on grid points.
inline double mirror_overlap_at_sample(const std::vector<double>& m, std::size_t k, double dt) {
    const std::size_t n = m.size();
    const std::size_t j_lo = (2 * k >= n - 1) ? 2 * k - (n - 1) : 0;
    const std::size_t j_hi = std::min(n - 1, 2 * k);
    if (j_lo >= j_hi) return 0.0;
    double acc = 0.0;
    for (std::size_t j = j_lo; j <= j_hi; ++j) {
        const double tw = (j == j_lo || j == j_hi) ? 0.5 : 1.0;
        acc += tw * m[j] * m[2 * k - j];
    }
    return acc * dt;
}

} // namespace detail

inline SymmetryResult symmetry_factor(const Pulse& pulse) {
    if (!(pulse.norm > 0.0)) throw validation_error("symmetry_factor: zero-norm pulse");
    const std::size_t n = pulse.samples.size();
    const double dt = pulse.grid.dt();

    std::vector<double> m(n);
    const double inv = 1.0 / std::sqrt(pulse.norm);
    double peak = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        m[i] = std::abs(pulse.samples[i]) * inv;
        peak = std::max(peak, m[i]);
    }

    SymmetryResult res;
    res.pulse_norm = pulse.norm;

    // residual-tail estimate from the closing decade of the window
    if (peak > 0.0 && m[n - 1] > 0.0) {
        const std::size_t ia = (9 * (n - 1)) / 10;
        const double span = pulse.grid.time_at(n - 1) - pulse.grid.time_at(ia);
        double tail = std::numeric_limits<double>::infinity();
        if (m[ia] > m[n - 1] && span > 0.0) {
            const double rate = std::log(m[ia] / m[n - 1]) / span;
            tail = m[n - 1] * m[n - 1] / (2.0 * rate);
        }
        if (tail > 1e-6)
            res.warnings.push_back("pulse tail beyond the window is not negligible");
    }

    // coarse scan at the sample step
    std::size_t best_k = 0;
    double best_s = -1.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double s = detail::mirror_overlap_at_sample(m, k, dt);
        if (s > best_s) { best_s = s; best_k = k; }
    }

    // golden-section refinement of the center
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = pulse.grid.time_at(best_k > 0 ? best_k - 1 : 0);
    double b = pulse.grid.time_at(std::min(best_k + 1, n - 1));
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = detail::mirror_overlap(pulse.grid, m, x1);
    double f2 = detail::mirror_overlap(pulse.grid, m, x2);
    while (b - a > 1e-6) {
        if (f1 < f2) {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + phi * (b - a);
            f2 = detail::mirror_overlap(pulse.grid, m, x2);
        } else {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - phi * (b - a);
            f1 = detail::mirror_overlap(pulse.grid, m, x1);
        }
    }
    const double t0 = 0.5 * (a + b);
    const double s_ref = detail::mirror_overlap(pulse.grid, m, t0);
    const double s = std::max(best_s, s_ref);
    res.t0_star = (s_ref >= best_s) ? t0 : pulse.grid.time_at(best_k);
    res.beta = s * s;
    return res;
}

struct PeakResult {
    double value = 0.0;
    double t_peak = 0.0;
};

// max_t |c_0(t)|^2 with three-point parabolic refinement at the peak.
inline PeakResult success_rate(const Trajectory& traj) {
    const auto& c0 = traj.amplitudes.at(0);
    const std::size_t n = c0.size();
    std::size_t best = 0;
    double pb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double p = std::norm(c0[i]);
        if (p > pb) { pb = p; best = i; }
    }
    PeakResult r{pb, traj.grid.time_at(best)};
    if (best > 0 && best + 1 < n) {
        const double pm = std::norm(c0[best - 1]);
        const double pp = std::norm(c0[best + 1]);
        const double denom = pm - 2.0 * pb + pp;
        if (denom < 0.0) {
            const double d = 0.5 * (pm - pp) / denom;
            r.value = pb - 0.25 * (pm - pp) * d;
            r.t_peak = traj.grid.time_at(best) + d * traj.grid.dt();
        }
    }
    return r;
}

// trapezoid int conj(p) q dt; grids must be identical
inline cplx pulse_overlap(const Pulse& p, const Pulse& q) {
    if (!(p.grid == q.grid)) throw validation_error("pulse_overlap: grid mismatch");
    cplx acc{};
    for (std::size_t i = 0; i < p.samples.size(); ++i) {
        const double w = (i == 0 || i + 1 == p.samples.size()) ? 0.5 : 1.0;
        acc += w * std::conj(p.samples[i]) * q.samples[i];
    }
    return acc * p.grid.dt();
}

} // namespace qpn
