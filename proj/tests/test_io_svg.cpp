#include <doctest.h>

#include <cmath>
#include <sstream>

#include "qpn/dynamics.hpp"
#include "qpn/io.hpp"
#include "qpn/optimize.hpp"
#include "qpn/svg.hpp"

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

TEST_CASE("fmt12 is stable and bounded to 12 significant digits") {
    CHECK(fmt12(1.0) == "1");
    CHECK(fmt12(0.5) == "0.5");
    CHECK(fmt12(1.0 / 3.0) == "0.333333333333");
    CHECK(fmt12(-2.5e-11) == "-2.5e-11");
    CHECK(fmt12(123456789012345.0) == "1.23456789012e+14");
    CHECK(json_num(1.0 / 3.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-11));
}

TEST_CASE("trajectory CSV carries the pinned header layout") {
    const auto traj = evolve_emission(optimal3(), TimeGrid{0.0, 20.0, 64});
    std::ostringstream out;
    write_trajectory_csv(out, traj);
    const std::string text = out.str();
    CHECK(text.rfind("t,re_c0,im_c0,re_c1,im_c1,re_c2,im_c2,re_c3,im_c3,re_e,im_e,"
                     "p_tls,p_waveguide_cum\n", 0) == 0);
    // first sample: excited TLS, nothing in the waveguide
    std::istringstream in(text);
    std::string header, first;
    std::getline(in, header);
    std::getline(in, first);
    CHECK(first.rfind("0,1,0,", 0) == 0);
}

TEST_CASE("pulse CSV round-trips") {
    const auto pulse = evolve_emission(optimal3(), TimeGrid{0.0, 20.0, 256}).emitted;
    std::ostringstream out;
    write_pulse_csv(out, pulse);
    std::istringstream in(out.str());
    const Pulse back = read_pulse_csv(in);
    REQUIRE(back.samples.size() == pulse.samples.size());
    CHECK(back.grid.t_end == doctest::Approx(20.0));
    double worst = 0.0;
    for (std::size_t i = 0; i < back.samples.size(); ++i)
        worst = std::max(worst, std::abs(back.samples[i] - pulse.samples[i]));
    CHECK(worst < 1e-11);  // 12 significant digits through the text form

    SUBCASE("missing columns are rejected") {
        std::istringstream bad("t,re\n0,1\n1,2\n");
        CHECK_THROWS_AS(read_pulse_csv(bad), io_error);
    }
    SUBCASE("non-uniform time axis is rejected") {
        std::istringstream bad("t,re_e,im_e\n0,1,0\n1,2,0\n3,1,0\n");
        CHECK_THROWS_AS(read_pulse_csv(bad), io_error);
    }
}

TEST_CASE("eigen and beta JSON layouts") {
    const auto eig = modal_amplitudes(optimal3(),
                                      eigendecompose(build_reduced_hamiltonian(optimal3())));
    const auto j = to_json(eig);
    REQUIRE(j.at("omega_re").size() == 4);
    REQUIRE(j.at("alpha_im").size() == 4);
    CHECK(j.at("omega_re")[0].get<double>() > j.at("omega_re")[3].get<double>());

    const auto pulse = evolve_emission(optimal3(), TimeGrid{0.0, 20.0, 2048}).emitted;
    const auto bj = to_json(symmetry_factor(pulse));
    CHECK(bj.contains("beta"));
    CHECK(bj.contains("t0_star"));
    CHECK(bj.contains("pulse_norm"));
}

TEST_CASE("marching squares find the unit circle") {
    std::vector<double> xs, ys;
    for (int i = 0; i <= 60; ++i) xs.push_back(-2.0 + 4.0 * i / 60.0);
    for (int j = 0; j <= 50; ++j) ys.push_back(-2.0 + 4.0 * j / 50.0);
    std::vector<double> field(xs.size() * ys.size());
    for (std::size_t j = 0; j < ys.size(); ++j)
        for (std::size_t i = 0; i < xs.size(); ++i)
            field[j * xs.size() + i] = -(xs[i] * xs[i] + ys[j] * ys[j]);  // level -1 is the circle
    const auto lines = contour_lines(xs, ys, field, -1.0);
    REQUIRE(lines.size() == 1);
    CHECK(is_closed(lines[0], 1e-6));
    CHECK(encircles(lines[0], 0.0, 0.0));
    CHECK(encircles(lines[0], 0.6, 0.6));
    CHECK(!encircles(lines[0], 1.2, 0.0));
    // every vertex sits on the circle to grid resolution
    for (const auto& [x, y] : lines[0])
        CHECK(std::sqrt(x * x + y * y) == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("line plot output is deterministic and shows the declared spans") {
    LinePlot plot("demo", "t", "p");
    plot.add_span({0.0, 5.0, "lightblue", "sending"});
    plot.add_span({5.0, 10.0, "lightgreen", "transport"});
    plot.add_span({10.0, 20.0, "mistyrose", "receiving"});
    Series s;
    s.label = "p0";
    s.color = "#1f77b4";
    for (int i = 0; i <= 100; ++i) {
        s.x.push_back(0.2 * i);
        s.y.push_back(std::exp(-0.1 * i));
    }
    plot.add_series(s);
    const std::string svg1 = plot.render();
    const std::string svg2 = plot.render();
    CHECK(svg1 == svg2);
    CHECK(svg1.find("lightblue") != std::string::npos);
    CHECK(svg1.find("lightgreen") != std::string::npos);
    CHECK(svg1.find("mistyrose") != std::string::npos);
    CHECK(svg1.find("<polyline") != std::string::npos);
    // exactly three shaded spans
    std::size_t count = 0, pos = 0;
    while ((pos = svg1.find("class=\"span\"", pos)) != std::string::npos) { ++count; ++pos; }
    CHECK(count == 3);
}

TEST_CASE("the 0.99 iso-line encircles the optimal couplings") {
    // beta evaluated directly on a fine local slice at kappa/g = 7.92
    SweepSpec spec;
    spec.n_rings = 3;
    spec.ranges = {{1.3, 2.5, 25}, {2.3, 3.6, 25}, {7.92, 7.92, 1}};
    const auto res = grid_sweep(spec, 2);

    std::vector<double> xs, ys;
    for (std::size_t k = 0; k < 25; ++k) {
        xs.push_back(spec.ranges[0].at(k));
        ys.push_back(spec.ranges[1].at(k));
    }
    // sweep order is (J12 slow, J23 fast); the contour field wants [iy][ix]
    std::vector<double> field(25 * 25);
    for (std::size_t ix = 0; ix < 25; ++ix)
        for (std::size_t iy = 0; iy < 25; ++iy) field[iy * 25 + ix] = res.beta[ix * 25 + iy];

    const auto lines = contour_lines(xs, ys, field, 0.99);
    REQUIRE(!lines.empty());
    bool found = false;
    for (const auto& line : lines)
        if (is_closed(line, 1e-6) && encircles(line, 1.88, 2.94)) found = true;
    CHECK(found);
    for (const auto& line : lines) CHECK(!encircles(line, 1.35, 2.35));
}

TEST_CASE("full-model trajectory CSV labels both circulation directions") {
    NodeConfig c = optimal3();
    c.backscatter = {0.2, 0.0, 0.0};
    const auto traj = evolve_full_emission(c, TimeGrid{0.0, 10.0, 32});
    std::ostringstream out;
    write_trajectory_csv(out, traj);
    const std::string text = out.str();
    CHECK(text.rfind("t,re_c0,im_c0,re_a1,im_a1,re_a2,im_a2,re_a3,im_a3,re_b1,im_b1,"
                     "re_b2,im_b2,re_b3,im_b3,re_e_plus,im_e_plus,re_e_minus,im_e_minus,"
                     "p_tls,p_waveguide_cum\n", 0) == 0);
}

TEST_CASE("absolute-unit scaling preserves the pulse norm") {
    NodeConfig c = optimal3();
    c.g = 5.0e9;
    for (double& j : c.j_rates) j *= 5.0e9;
    c.kappa *= 5.0e9;
    const auto pulse = evolve_emission(c, TimeGrid{0.0, 20.0, 512}).emitted;
    std::ostringstream out;
    write_pulse_csv(out, pulse, {}, UnitScale::absolute(c.g));
    std::istringstream in(out.str());
    const Pulse back = read_pulse_csv(in);
    CHECK(back.grid.t_end == doctest::Approx(20.0 / 5.0e9).epsilon(1e-9));
    CHECK(back.norm == doctest::Approx(pulse.norm).epsilon(1e-9));
}

TEST_CASE("contour svg renders every requested level") {
    std::vector<double> xs{0.0, 1.0, 2.0}, ys{0.0, 1.0};
    std::vector<double> field{0.0, 1.0, 0.0, 0.2, 1.2, 0.2};
    const std::string svg =
        render_contour_svg(xs, ys, field, {0.5, 1.1}, "slice", "x", "y");
    CHECK(svg.find("level 0.5") != std::string::npos);
    CHECK(svg.find("level 1.1") != std::string::npos);
    CHECK(svg.find("<polyline") != std::string::npos);
}
