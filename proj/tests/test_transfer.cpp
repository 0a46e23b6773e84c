#include <doctest.h>

#include <cmath>

#include "qpn/metrics.hpp"
#include "qpn/transfer.hpp"

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

} // namespace

TEST_CASE("identical optimal nodes transfer the excitation at the symmetry factor") {
    const auto rep = run_transfer(optimal3(), optimal3(), 5.0);
    CHECK(rep.f == doctest::Approx(0.993).epsilon(3e-3));
    CHECK(std::abs(rep.f - rep.beta) < 0.005);
    CHECK(rep.f <= 1.0);
    CHECK(rep.emitted.norm == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(rep.warnings.empty());

    SUBCASE("loss budget closes to within 1e-3") {
        CHECK(rep.f + rep.budget.total() == doctest::Approx(1.0).epsilon(1e-3));
    }
    SUBCASE("delay only slides the clock") {
        const auto r2 = run_transfer(optimal3(), optimal3(), 2.0);
        const auto r9 = run_transfer(optimal3(), optimal3(), 9.0);
        CHECK(std::abs(r2.f - r9.f) < 1e-9);
        CHECK(std::abs((r9.t_peak - r2.t_peak) - 7.0) < 1e-6);
    }
}

TEST_CASE("swapping the receiver's hopping order breaks the matching") {
    NodeConfig swapped = optimal3();
    swapped.j_rates = {2.94, 1.88};
    const auto matched = run_transfer(optimal3(), optimal3(), 5.0);
    const auto rep = run_transfer(optimal3(), swapped, 5.0);
    CHECK(rep.f < matched.f);
    CHECK(rep.f < 0.6);
}

TEST_CASE("a lossy sender shows up in the budget") {
    NodeConfig lossy = optimal3();
    lossy.gamma0 = 0.01;
    lossy.gamma_c = 0.01;
    const auto rep = run_transfer(lossy, optimal3(), 5.0);
    CHECK(rep.f < 0.993);
    CHECK(rep.budget.sender_gamma0 > 0.0);
    CHECK(rep.budget.sender_gammac > 0.0);
    CHECK(rep.f + rep.budget.total() == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("run_transfer is the manual composition of its stages") {
    const auto rep = run_transfer(optimal3(), optimal3(), 5.0);

    const TimeGrid emit_grid{0.0, 20.0, 4096};
    const auto emitted = evolve_emission(optimal3(), emit_grid).emitted;
    const Pulse delayed = shift_pulse(emitted, 5.0);
    const auto recv = evolve_driven(optimal3(), delayed, rep.receiver_traj.grid);

    REQUIRE(recv.n_samples() == rep.receiver_traj.n_samples());
    double worst = 0.0;
    for (std::size_t i = 0; i < recv.n_samples(); ++i)
        worst = std::max(worst, std::abs(recv.amplitudes[0][i] -
                                         rep.receiver_traj.amplitudes[0][i]));
    CHECK(worst == 0.0);
}

TEST_CASE("sender decay and receiver rise mirror about the midpoint") {
    const auto rep = run_transfer(optimal3(), optimal3(), 5.0);
    const auto& s = rep.sender_traj;
    const auto& r = rep.receiver_traj;
    std::vector<double> ps(s.n_samples()), pr(r.n_samples());
    for (std::size_t i = 0; i < s.n_samples(); ++i) ps[i] = std::norm(s.amplitudes[0][i]);
    for (std::size_t i = 0; i < r.n_samples(); ++i)
        pr[i] = std::norm(r.amplitudes[0][i]) / rep.f;

    auto dev_for_center = [&](double tc) {
        double worst = 0.0;
        for (std::size_t i = 0; i < s.n_samples(); ++i) {
            const double tr = 2.0 * tc - s.grid.time_at(i);
            if (tr < r.grid.t_start || tr > r.grid.t_end) continue;
            const double x = (tr - r.grid.t_start) / r.grid.dt();
            const std::size_t k = std::min(static_cast<std::size_t>(x), r.n_samples() - 2);
            const double w = x - static_cast<double>(k);
            worst = std::max(worst, std::abs(pr[k] * (1.0 - w) + pr[k + 1] * w - ps[i]));
        }
        return worst;
    };
    double best = 1e9;
    for (double tc = 0.5 * rep.t_peak - 0.5; tc <= 0.5 * rep.t_peak + 0.5; tc += 0.001)
        best = std::min(best, dev_for_center(tc));
    CHECK(best < 2.5e-3);  // peak-normalized shape floor for beta = 0.9932
}

TEST_CASE("asymmetric nodes are allowed but score lower") {
    NodeConfig other = optimal3();
    other.kappa = 5.0;
    const auto rep = run_transfer(optimal3(), other, 5.0);
    CHECK(rep.f < 0.993);
    CHECK(rep.f > 0.0);
}

TEST_CASE("negative delay is rejected") {
    CHECK_THROWS_AS(run_transfer(optimal3(), optimal3(), -1.0), validation_error);
}

TEST_CASE("a short emission window propagates a warning") {
    TransferOptions opt;
    opt.t_emit = 3.0;
    opt.emit_samples = 512;
    const auto rep = run_transfer(optimal3(), optimal3(), 1.0, opt);
    CHECK(!rep.warnings.empty());
}
