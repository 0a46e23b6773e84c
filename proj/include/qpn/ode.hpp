// ode.hpp — adaptive embedded Runge-Kutta 5(4) (Dormand-Prince) for complex
// state vectors, with the standard 4th-order dense-output interpolant used to
// resample trajectories onto output grids.

#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <sstream>
#include <vector>

#include "qpn/errors.hpp"
#include "qpn/grid.hpp"

namespace qpn {

struct OdeOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    double h_max = 1.0;
    std::size_t max_steps = 4'000'000;
};

using OdeRhs = std::function<void(double, const std::vector<cplx>&, std::vector<cplx>&)>;
using OdeSampleSink = std::function<void(std::size_t, const std::vector<cplx>&)>;

namespace detail {

// Dormand-Prince coefficients (FSAL pair).
constexpr double C2 = 1.0 / 5, C3 = 3.0 / 10, C4 = 4.0 / 5, C5 = 8.0 / 9;
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561,
                 A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247, A64 = 49.0 / 176,
                 A65 = -5103.0 / 18656;
constexpr double A71 = 35.0 / 384, A73 = 500.0 / 1113, A74 = 125.0 / 192, A75 = -2187.0 / 6784,
                 A76 = 11.0 / 84;
constexpr double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920, E5 = -17253.0 / 339200,
                 E6 = 22.0 / 525, E7 = -1.0 / 40;
// dense-output coefficients
constexpr double D1 = -12715105075.0 / 11282082432.0, D3 = 87487479700.0 / 32700410799.0,
                 D4 = -10690763975.0 / 1880347072.0, D5 = 701980252875.0 / 199316789632.0,
                 D6 = -1453857185.0 / 822651844.0, D7 = 69997945.0 / 29380423.0;

} // namespace detail

// Integrates dy/dt = rhs(t, y) over [t_begin, t_end]; sample_times must be
// ascending and within the interval, each one is delivered to on_sample
// (by index) through the dense-output interpolant.
inline void integrate_dopri5(const OdeRhs& rhs, std::vector<cplx> y, double t_begin, double t_end,
                             std::span<const double> sample_times, const OdeSampleSink& on_sample,
                             const OdeOptions& opt = {}) {
    using namespace detail;
    if (!(t_end > t_begin)) throw validation_error("integrate_dopri5: empty time interval");
    const std::size_t n = y.size();
    double t = t_begin;
    std::size_t next_sample = 0;

    // samples at (or numerically before) the start get the initial state
    while (next_sample < sample_times.size() &&
           sample_times[next_sample] <= t + 1e-14 * std::max(1.0, std::abs(t))) {
        on_sample(next_sample, y);
        ++next_sample;
    }

    std::vector<cplx> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);
    std::vector<cplx> ytmp(n), ynew(n), yerr(n);
    std::vector<cplx> r2(n), r3(n), r4(n), r5(n);  // dense-output polynomials

    rhs(t, y, k1);
    double h = std::min(opt.h_max, 1e-4 * (t_end - t_begin));
    std::size_t steps = 0;
    bool rejected = false;

    while (t < t_end) {
        if (t_end - t <= 1e-14 * std::max(1.0, std::abs(t_end))) break;
        if (++steps > opt.max_steps)
            throw numerical_error("integrate_dopri5: step budget exhausted at t = " +
                                  std::to_string(t));
        if (t + h > t_end) h = t_end - t;
        if (!(h > 0.0) || t + h == t) {
            std::ostringstream msg;
            msg << "integrate_dopri5: step size underflow (stiffness) at t = " << t;
            throw numerical_error(msg.str());
        }

        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * A21 * k1[i];
        rhs(t + C2 * h, ytmp, k2);
        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        rhs(t + C3 * h, ytmp, k3);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        rhs(t + C4 * h, ytmp, k4);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        rhs(t + C5 * h, ytmp, k5);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] +
                                  A65 * k5[i]);
        rhs(t + h, ytmp, k6);
        for (std::size_t i = 0; i < n; ++i)
            ynew[i] = y[i] + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] +
                                  A76 * k6[i]);
        rhs(t + h, ynew, k7);

        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            yerr[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] +
                           E7 * k7[i]);
            const double sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            const double q = std::abs(yerr[i]) / sc;
            err += q * q;
        }
        err = std::sqrt(err / static_cast<double>(n));

        if (err <= 1.0) {
            bool dense_ready = false;
            const double slack = 1e-12 * std::max(1.0, std::abs(t + h));
            while (next_sample < sample_times.size() &&
                   sample_times[next_sample] <= t + h + slack) {
                if (!dense_ready) {
                    for (std::size_t i = 0; i < n; ++i) {
                        const cplx dy = ynew[i] - y[i];
                        r2[i] = dy;
                        r3[i] = h * k1[i] - dy;
                        r4[i] = dy - h * k7[i] - r3[i];
                        r5[i] = h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] +
                                     D6 * k6[i] + D7 * k7[i]);
                    }
                    dense_ready = true;
                }
                const double th =
                    std::min(1.0, std::max(0.0, (sample_times[next_sample] - t) / h));
                const double th1 = 1.0 - th;
                for (std::size_t i = 0; i < n; ++i)
                    ytmp[i] = y[i] + th * (r2[i] + th1 * (r3[i] + th * (r4[i] + th1 * r5[i])));
                on_sample(next_sample, ytmp);
                ++next_sample;
            }
            t += h;
            y.swap(ynew);
            k1.swap(k7);  // FSAL
            double fac = 0.9 * std::pow(std::max(err, 1e-16), -0.2);
            fac = std::min(rejected ? 1.0 : 5.0, std::max(0.2, fac));
            h = std::min(h * fac, opt.h_max);
            rejected = false;
        } else {
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
            rejected = true;
        }
    }
    // anything left is the end point up to rounding; deliver the final state
    while (next_sample < sample_times.size()) {
        on_sample(next_sample, y);
        ++next_sample;
    }
}

inline void integrate_dopri5(const OdeRhs& rhs, std::vector<cplx> y, const TimeGrid& grid,
                             const OdeSampleSink& on_sample, const OdeOptions& opt = {}) {
    grid.validate();
    std::vector<double> times(grid.n_samples);
    for (std::size_t i = 0; i < grid.n_samples; ++i) times[i] = grid.time_at(i);
    integrate_dopri5(rhs, std::move(y), grid.t_start, grid.t_end, times, on_sample, opt);
}

} // namespace qpn
