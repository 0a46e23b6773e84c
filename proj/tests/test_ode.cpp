#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "qpn/ode.hpp"

using namespace qpn;

TEST_CASE("integrator reproduces a complex exponential through dense output") {
    const cplx lambda{-0.3, 2.1};
    const OdeRhs rhs = [&](double, const std::vector<cplx>& y, std::vector<cplx>& dy) {
        dy[0] = lambda * y[0];
    };
    const TimeGrid grid{0.0, 12.0, 777};  // samples never align with internal steps
    std::vector<cplx> got(grid.n_samples);
    integrate_dopri5(rhs, {cplx{1.0, 0.0}}, grid,
                     [&](std::size_t i, const std::vector<cplx>& y) { got[i] = y[0]; });
    for (std::size_t i = 0; i < grid.n_samples; ++i) {
        const cplx exact = std::exp(lambda * grid.time_at(i));
        CHECK(std::abs(got[i] - exact) < 2e-9);
    }
}

TEST_CASE("tightening tolerances changes the answer below the tolerance scale") {
    const OdeRhs rhs = [](double t, const std::vector<cplx>& y, std::vector<cplx>& dy) {
        dy[0] = cplx{0.0, -1.0} * std::cos(t) * y[0] + cplx{0.05, 0.0} * y[1];
        dy[1] = cplx{0.0, 1.0} * y[0] - cplx{0.1, 0.0} * y[1];
    };
    const TimeGrid grid{0.0, 25.0, 257};
    auto run = [&](double rtol, double atol) {
        std::vector<cplx> last(2);
        OdeOptions opt;
        opt.rtol = rtol;
        opt.atol = atol;
        integrate_dopri5(rhs, {cplx{1.0, 0.0}, cplx{0.0, 0.0}}, grid,
                         [&](std::size_t, const std::vector<cplx>& y) { last = y; }, opt);
        return last;
    };
    const auto a = run(1e-10, 1e-12);
    const auto b = run(5e-11, 5e-13);
    CHECK(std::abs(a[0] - b[0]) < 5e-9);
    CHECK(std::abs(a[1] - b[1]) < 5e-9);
}

TEST_CASE("finite-time blow-up reports a step failure instead of looping") {
    const OdeRhs rhs = [](double, const std::vector<cplx>& y, std::vector<cplx>& dy) {
        dy[0] = y[0] * y[0];
    };
    OdeOptions opt;
    opt.max_steps = 20000;
    const TimeGrid grid{0.0, 2.0, 16};  // solution diverges at t = 1
    CHECK_THROWS_AS(
        integrate_dopri5(rhs, {cplx{1.0, 0.0}}, grid,
                         [](std::size_t, const std::vector<cplx>&) {}, opt),
        numerical_error);
}

TEST_CASE("samples at the start and end of the window are delivered") {
    const OdeRhs rhs = [](double, const std::vector<cplx>&, std::vector<cplx>& dy) {
        dy[0] = cplx{1.0, 0.0};
    };
    const TimeGrid grid{0.0, 1.0, 5};
    std::vector<bool> seen(grid.n_samples, false);
    std::vector<cplx> vals(grid.n_samples);
    integrate_dopri5(rhs, {cplx{}}, grid, [&](std::size_t i, const std::vector<cplx>& y) {
        seen[i] = true;
        vals[i] = y[0];
    });
    for (bool s : seen) CHECK(s);
    CHECK(std::abs(vals[0]) < 1e-15);
    CHECK(std::abs(vals[4] - cplx{1.0, 0.0}) < 1e-12);
}
