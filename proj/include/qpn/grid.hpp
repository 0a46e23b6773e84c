// grid.hpp — uniform time grids and sampled complex pulses.
// Times are in units of 1/g throughout.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "qpn/errors.hpp"
#include "qpn/mat.hpp"

namespace qpn {

struct TimeGrid {
    double t_start = 0.0;
    double t_end = 20.0;
    std::size_t n_samples = 4096;

    void validate() const {
        if (!(t_end > t_start)) throw validation_error("TimeGrid: t_end must be > t_start");
        if (n_samples < 2) throw validation_error("TimeGrid: n_samples must be >= 2");
    }
    double dt() const { return (t_end - t_start) / static_cast<double>(n_samples - 1); }
    double time_at(std::size_t i) const { return t_start + dt() * static_cast<double>(i); }

    bool operator==(const TimeGrid&) const = default;
};

// Composite trapezoid of |e|^2 on the grid.
inline double trapezoid_norm(const TimeGrid& grid, const std::vector<cplx>& samples) {
    double s = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double w = (i == 0 || i + 1 == samples.size()) ? 0.5 : 1.0;
        s += w * std::norm(samples[i]);
    }
    return s * grid.dt();
}

struct Pulse {
    TimeGrid grid;
    std::vector<cplx> samples;
    double norm = 0.0;  // integral of |e|^2 over the grid
};

inline Pulse make_pulse(const TimeGrid& grid, std::vector<cplx> samples) {
    grid.validate();
    if (samples.size() != grid.n_samples)
        throw validation_error("Pulse: sample count does not match grid");
    Pulse p{grid, std::move(samples), 0.0};
    p.norm = trapezoid_norm(p.grid, p.samples);
    return p;
}

// Exact time shift: same samples on a translated grid.
inline Pulse shift_pulse(const Pulse& p, double delay) {
    Pulse out = p;
    out.grid.t_start += delay;
    out.grid.t_end += delay;
    return out;
}

inline Pulse gaussian_pulse(const TimeGrid& grid, double center, double width) {
    if (!(width > 0.0)) throw validation_error("gaussian_pulse: width must be > 0");
    std::vector<cplx> s(grid.n_samples);
    for (std::size_t i = 0; i < grid.n_samples; ++i) {
        const double t = grid.time_at(i);
        s[i] = std::exp(-0.5 * (t - center) * (t - center) / (width * width));
    }
    return make_pulse(grid, std::move(s));
}

// sqrt(rate) * exp(-rate t / 2) for t >= t_on; unit norm on [t_on, inf).
inline Pulse one_sided_exponential_pulse(const TimeGrid& grid, double rate, double t_on = 0.0) {
    if (!(rate > 0.0)) throw validation_error("one_sided_exponential_pulse: rate must be > 0");
    std::vector<cplx> s(grid.n_samples);
    for (std::size_t i = 0; i < grid.n_samples; ++i) {
        const double t = grid.time_at(i);
        s[i] = (t >= t_on) ? std::sqrt(rate) * std::exp(-0.5 * rate * (t - t_on)) : 0.0;
    }
    return make_pulse(grid, std::move(s));
}

} // namespace qpn
