// End-to-end checks of the qpnode binary: spawned as a subprocess, outputs
// parsed back from disk. QPNODE_BIN is injected by CMake.

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("qpnode_test_" + std::to_string(std::rand()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

int run(const std::string& args) {
    const std::string cmd = std::string(QPNODE_BIN) + " " + args + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_optimal_config(const std::string& path) {
    std::ofstream out(path);
    out << R"({"n_rings": 3, "g": 1.0, "j_rates": [1.88, 2.94], "kappa": 7.92})";
}

} // namespace

TEST_CASE("emit writes pulse, trajectory, beta, and a complete manifest") {
    TempDir dir;
    write_optimal_config(dir.file("node.json"));
    const int rc = run("emit --config " + dir.file("node.json") + " --out-prefix " +
                       dir.file("emit"));
    REQUIRE(rc == 0);
    const json manifest = json::parse(slurp(dir.file("emit_manifest.json")));
    CHECK(manifest.at("command") == "emit");
    CHECK(manifest.at("config").at("kappa") == 7.92);
    CHECK(manifest.at("integrator").at("rtol") == 1e-10);
    for (const auto& f : manifest.at("outputs")) CHECK(fs::exists(f.get<std::string>()));

    const json beta = json::parse(slurp(dir.file("emit_beta.json")));
    CHECK(beta.at("beta").get<double>() == doctest::Approx(0.9932).epsilon(2e-3));
    CHECK(beta.at("pulse_norm").get<double>() == doctest::Approx(1.0).epsilon(1e-5));

    // pulse CSV includes the four eigenmode components
    const std::string pulse = slurp(dir.file("emit_pulse.csv"));
    CHECK(pulse.rfind("t,re_e,im_e,re_e1,im_e1,re_e2,im_e2,re_e3,im_e3,re_e4,im_e4\n", 0) == 0);
}

TEST_CASE("beta subcommand on synthetic pulses") {
    TempDir dir;
    int rc = run("beta --pulse gaussian --width 1 --out " + dir.file("b.json"));
    REQUIRE(rc == 0);
    CHECK(json::parse(slurp(dir.file("b.json"))).at("beta").get<double>() ==
          doctest::Approx(1.0).epsilon(1e-6));

    rc = run("beta --pulse exponential --rate 1 --window 40 --samples 32768 --out " +
             dir.file("e.json"));
    REQUIRE(rc == 0);
    CHECK(json::parse(slurp(dir.file("e.json"))).at("beta").get<double>() ==
          doctest::Approx(0.541341).epsilon(5e-4));
}

TEST_CASE("transfer reproduces the headline success rate and is byte-deterministic") {
    TempDir dir;
    write_optimal_config(dir.file("node.json"));
    const std::string base = "transfer --config " + dir.file("node.json") + " --delay 5";
    REQUIRE(run(base + " --out-prefix " + dir.file("a")) == 0);
    REQUIRE(run(base + " --out-prefix " + dir.file("b")) == 0);

    const json report = json::parse(slurp(dir.file("a_report.json")));
    CHECK(report.at("F").get<double>() == doctest::Approx(0.993).epsilon(3e-3));
    CHECK(std::abs(report.at("F").get<double>() - report.at("beta").get<double>()) < 0.005);

    CHECK(slurp(dir.file("a_report.json")) == slurp(dir.file("b_report.json")));
    CHECK(slurp(dir.file("a_combined.csv")) == slurp(dir.file("b_combined.csv")));
    CHECK(slurp(dir.file("a_receiver.csv")) == slurp(dir.file("b_receiver.csv")));

    SUBCASE("the combined CSV feeds the transfer figure") {
        REQUIRE(run("plot --kind transfer --in " + dir.file("a_combined.csv") + " --out " +
                    dir.file("fig.svg")) == 0);
        const std::string svg = slurp(dir.file("fig.svg"));
        CHECK(svg.find("lightblue") != std::string::npos);
        CHECK(svg.find("lightgreen") != std::string::npos);
        CHECK(svg.find("mistyrose") != std::string::npos);
        std::size_t spans = 0, pos = 0;
        while ((pos = svg.find("class=\"span\"", pos)) != std::string::npos) { ++spans; ++pos; }
        CHECK(spans == 3);
    }
    SUBCASE("receive consumes the emitted pulse") {
        REQUIRE(run("emit --config " + dir.file("node.json") + " --out-prefix " +
                    dir.file("em")) == 0);
        REQUIRE(run("receive --config " + dir.file("node.json") + " --pulse " +
                    dir.file("em_pulse.csv") + " --out-prefix " + dir.file("rx")) == 0);
        const json rx = json::parse(slurp(dir.file("rx_receive.json")));
        CHECK(rx.at("F").get<double>() == doctest::Approx(0.993).epsilon(3e-3));
    }
}

TEST_CASE("eigen emits the sorted spectrum with modal amplitudes") {
    TempDir dir;
    write_optimal_config(dir.file("node.json"));
    REQUIRE(run("eigen --config " + dir.file("node.json") + " --out " + dir.file("eig.json")) ==
            0);
    const json eig = json::parse(slurp(dir.file("eig.json")));
    REQUIRE(eig.at("omega_re").size() == 4);
    CHECK(eig.at("omega_re")[0].get<double>() == doctest::Approx(2.730976).epsilon(1e-5));
    CHECK(eig.at("omega_im")[0].get<double>() == doctest::Approx(-0.868123).epsilon(1e-5));
    CHECK(eig.at("alpha_re").size() == 4);

    SUBCASE("the full model carries seven eigenvalues") {
        REQUIRE(run("eigen --config " + dir.file("node.json") + " --full --out " +
                    dir.file("eigf.json")) == 0);
        const json f = json::parse(slurp(dir.file("eigf.json")));
        CHECK(f.at("omega_re").size() == 7);
        CHECK(f.at("alpha_re").empty());
    }
}

TEST_CASE("design subcommands") {
    TempDir dir;
    REQUIRE(run("design-g --lambda-nm 785 --linewidth-hz 30e6 --n-index 1.8 --veff-um3 12 "
                "--out " +
                dir.file("g.json")) == 0);
    const json g = json::parse(slurp(dir.file("g.json")));
    CHECK(g.at("g").get<double>() == doctest::Approx(7.7068e9).epsilon(1e-4));

    {
        std::ofstream jj(dir.file("jj.csv"));
        jj << "gap_nm, rate_ghz\n";
        for (int k = 0; k <= 15; ++k)
            jj << 60 + 20 * k << ", " << 80.0 * std::exp(-0.015 * 20 * k) << "\n";
        std::ofstream kw(dir.file("kw.csv"));
        kw << "gap_nm, rate_ghz\n";
        for (int k = 0; k <= 15; ++k)
            kw << 60 + 20 * k << ", " << 200.0 * std::exp(-0.018 * 20 * k) << "\n";
    }
    REQUIRE(run("design-gap --g " + json::parse(slurp(dir.file("g.json"))).at("g").dump() +
                " --ring-ring " + dir.file("jj.csv") + " --ring-waveguide " + dir.file("kw.csv") +
                " --out " + dir.file("plan.json")) == 0);
    const json plan = json::parse(slurp(dir.file("plan.json")));
    CHECK(plan.at("gaps").contains("j12"));
    CHECK(plan.at("gaps").contains("j23"));
    CHECK(plan.at("gaps").contains("kappa"));
    CHECK(plan.at("gaps").at("j12").get<double>() > plan.at("gaps").at("j23").get<double>());
    CHECK(plan.at("table_rows_used").size() == 3);
}

TEST_CASE("sweep and contour plot") {
    TempDir dir;
    REQUIRE(run("sweep --n 3 --grid 7x7x3 --ranges 1.3:2.5,2.3:3.5,7:9 --samples 512 --out " +
                dir.file("sweep.csv")) == 0);

    SUBCASE("the worker env var is honored and does not change results") {
        const std::string cmd = std::string("CASCADE_NODE_WORKERS=2 ") + QPNODE_BIN +
                                " sweep --n 3 --grid 7x7x3 --ranges 1.3:2.5,2.3:3.5,7:9"
                                " --samples 512 --out " +
                                dir.file("sweep_env.csv") + " 2>/dev/null";
        REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
        CHECK(slurp(dir.file("sweep_env.csv")) == slurp(dir.file("sweep.csv")));
    }
    const std::string csv = slurp(dir.file("sweep.csv"));
    CHECK(csv.rfind("J12,J23,kappa,beta\n", 0) == 0);
    REQUIRE(run("plot --kind sweep-slice --in " + dir.file("sweep.csv") +
                " --kappa 8 --levels 0.9,0.97 --out " + dir.file("map.svg")) == 0);
    CHECK(slurp(dir.file("map.svg")).find("level 0.9") != std::string::npos);
}

TEST_CASE("validate runs the invariant suite") {
    CHECK(run("validate --trials 3 --seed 7") == 0);
}

TEST_CASE("exit codes: validation 1, io 3, usage 1") {
    TempDir dir;
    // bad config value
    {
        std::ofstream out(dir.file("bad.json"));
        out << R"({"n_rings": 3, "j_rates": [1.88, 2.94], "kappa": -7.92})";
    }
    CHECK(run("emit --config " + dir.file("bad.json")) == 1);
    // missing file
    CHECK(run("emit --config " + dir.file("missing.json")) == 3);
    // unknown flag
    CHECK(run("emit --config x --definitely-not-a-flag") == 1);
    // empty trajectory data for plotting
    {
        std::ofstream out(dir.file("empty.csv"));
        out << "t,p_tls_sender,p_rings_sender,pulse_abs2,p_tls_receiver,p_rings_receiver\n";
    }
    CHECK(run("plot --kind transfer --in " + dir.file("empty.csv") + " --out " +
              dir.file("x.svg")) == 3);
}
