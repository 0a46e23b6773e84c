#include <doctest.h>

#include <cmath>
#include <complex>

#include "qpn/dynamics.hpp"
#include "qpn/metrics.hpp"

using namespace qpn;

namespace {

NodeConfig optimal3() {
    NodeConfig c;
    c.n_rings = 3;
    c.g = 1.0;
    c.j_rates = {1.88, 2.94};
    c.kappa = 7.92;
    return c;
}

Pulse scaled(const Pulse& p, cplx w) {
    std::vector<cplx> s(p.samples);
    for (auto& v : s) v *= w;
    return make_pulse(p.grid, std::move(s));
}

} // namespace

TEST_CASE("a Gaussian is perfectly time-symmetric") {
    const TimeGrid grid{0.0, 20.0, 4096};
    const auto res = symmetry_factor(gaussian_pulse(grid, 8.0, 1.0));
    CHECK(res.beta == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(res.t0_star == doctest::Approx(8.0).epsilon(1e-4));
    CHECK(res.normalized);
}

TEST_CASE("one-sided exponential: beta = 4 / e^2") {
    const TimeGrid grid{0.0, 40.0, 1 << 15};
    const auto res = symmetry_factor(one_sided_exponential_pulse(grid, 1.0));
    CHECK(res.beta == doctest::Approx(4.0 / (M_E * M_E)).epsilon(1e-4));
    // optimal center at 1/rate
    CHECK(res.t0_star == doctest::Approx(1.0).epsilon(2e-2));
}

TEST_CASE("beta at the optimal coupling point") {
    const auto emitted = evolve_emission(optimal3(), TimeGrid{0.0, 20.0, 4096}).emitted;
    const auto res = symmetry_factor(emitted);
    CHECK(res.beta == doctest::Approx(0.99322).epsilon(1e-3));
    CHECK(res.beta <= 1.0 + 1e-9);
    CHECK(res.warnings.empty());
}

TEST_CASE("beta is invariant under translation, global phase, and time reversal") {
    const TimeGrid grid{0.0, 30.0, 4096};
    NodeConfig c = optimal3();
    const auto base = evolve_emission(c, TimeGrid{0.0, 20.0, 4096}).emitted;
    const double beta0 = symmetry_factor(base).beta;

    SUBCASE("translation") {
        // same samples, grid moved in time
        const double b = symmetry_factor(shift_pulse(base, 4.5)).beta;
        CHECK(std::abs(b - beta0) < 1e-8);
    }
    SUBCASE("global phase") {
        const double b = symmetry_factor(scaled(base, std::polar(1.0, 0.7))).beta;
        CHECK(std::abs(b - beta0) < 1e-8);
    }
    SUBCASE("time reversal") {
        std::vector<cplx> rev(base.samples.rbegin(), base.samples.rend());
        const double b = symmetry_factor(make_pulse(base.grid, std::move(rev))).beta;
        CHECK(std::abs(b - beta0) < 1e-8);
    }
    SUBCASE("amplitude scaling drops out exactly") {
        const double b = symmetry_factor(scaled(base, cplx{2.5, 0.0})).beta;
        CHECK(std::abs(b - beta0) < 1e-12);
    }
    (void)grid;
}

TEST_CASE("mirror overlap never beats Cauchy-Schwarz") {
    const auto emitted = evolve_emission(optimal3(), TimeGrid{0.0, 20.0, 2048}).emitted;
    std::vector<double> m(emitted.samples.size());
    for (std::size_t i = 0; i < m.size(); ++i)
        m[i] = std::abs(emitted.samples[i]) / std::sqrt(emitted.norm);
    for (double t0 = 0.0; t0 <= 20.0; t0 += 0.37)
        CHECK(detail::mirror_overlap(emitted.grid, m, t0) <= 1.0 + 1e-9);
}

TEST_CASE("zero-norm pulse is rejected") {
    const TimeGrid grid{0.0, 1.0, 64};
    CHECK_THROWS_AS(symmetry_factor(make_pulse(grid, std::vector<cplx>(64, cplx{}))),
                    validation_error);
}

TEST_CASE("an unfinished pulse carries a tail warning") {
    const TimeGrid grid{0.0, 4.0, 512};
    const auto res = symmetry_factor(one_sided_exponential_pulse(grid, 0.5));
    REQUIRE(!res.warnings.empty());
}

TEST_CASE("success rate: zero trajectory and phase invariance") {
    const TimeGrid grid{0.0, 20.0, 1024};
    const Pulse zero = make_pulse(grid, std::vector<cplx>(grid.n_samples, cplx{}));
    CHECK(success_rate(evolve_driven(optimal3(), zero)).value == 0.0);

    const auto emitted = evolve_emission(optimal3(), grid).emitted;
    const double f1 = success_rate(evolve_driven(optimal3(), emitted)).value;
    const double f2 =
        success_rate(evolve_driven(optimal3(), scaled(emitted, std::polar(1.0, 1.1)))).value;
    CHECK(std::abs(f1 - f2) < 1e-12);

    SUBCASE("parabolic refinement sits at or above the grid peak") {
        const auto traj = evolve_driven(optimal3(), emitted);
        double grid_max = 0.0;
        for (const cplx& v : traj.amplitudes[0]) grid_max = std::max(grid_max, std::norm(v));
        const auto pk = success_rate(traj);
        CHECK(pk.value >= grid_max);
        CHECK(pk.value < grid_max + 1e-4);
    }
}

TEST_CASE("pulse overlap basics") {
    const TimeGrid grid{0.0, 20.0, 2048};
    const Pulse g1 = gaussian_pulse(grid, 6.0, 0.8);
    CHECK(pulse_overlap(g1, g1).real() == doctest::Approx(g1.norm).epsilon(1e-12));
    CHECK(std::abs(pulse_overlap(g1, g1).imag()) < 1e-15);

    const Pulse g2 = gaussian_pulse(grid, 16.0, 0.55);  // disjoint support
    CHECK(std::abs(pulse_overlap(g1, g2)) < 1e-12);

    const TimeGrid other{0.0, 20.0, 1024};
    CHECK_THROWS_AS(pulse_overlap(g1, gaussian_pulse(other, 6.0, 0.8)), validation_error);
}

TEST_CASE("overlap with the conjugate mirror reproduces beta at the optimum") {
    const auto emitted = evolve_emission(optimal3(), TimeGrid{0.0, 20.0, 4096}).emitted;
    const auto sym = symmetry_factor(emitted);

    // conj(e(2 t0* - t)) sampled on the same grid, zero outside
    const auto& grid = emitted.grid;
    std::vector<cplx> mirror(grid.n_samples, cplx{});
    for (std::size_t i = 0; i < grid.n_samples; ++i) {
        const double tr = 2.0 * sym.t0_star - grid.time_at(i);
        if (tr < grid.t_start || tr > grid.t_end) continue;
        const double x = (tr - grid.t_start) / grid.dt();
        const std::size_t k = std::min(static_cast<std::size_t>(x), grid.n_samples - 2);
        const double w = x - static_cast<double>(k);
        mirror[i] = std::conj(emitted.samples[k] * (1.0 - w) + emitted.samples[k + 1] * w);
    }
    const Pulse unit = scaled(emitted, cplx{1.0 / std::sqrt(emitted.norm), 0.0});
    const Pulse munit = scaled(make_pulse(grid, std::move(mirror)),
                               cplx{1.0 / std::sqrt(emitted.norm), 0.0});
    const double ov2 = std::norm(pulse_overlap(unit, munit));
    CHECK(ov2 == doctest::Approx(0.993).epsilon(2e-3));
    CHECK(ov2 <= sym.beta + 1e-9);
    CHECK(std::abs(ov2 - sym.beta) < 1e-3);
}
