// config.hpp — physical rates of one quantum photonic node, validation, and
// the JSON wire format.
//
// Rates may be absolute (rad/s) or already normalized; only the ratios
// (J/g, kappa/g, ...) affect the dynamics, so everything downstream works on
// normalized() configs with g = 1 and time in units of 1/g.

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "qpn/errors.hpp"

namespace qpn {

struct NodeConfig {
    std::size_t n_rings = 1;          // N
    double g = 1.0;                   // TLS-ring coupling
    std::vector<double> j_rates;      // ring-ring hopping J_{n,n+1}, size N-1
    double kappa = 1.0;               // last-ring to waveguide decay
    std::vector<double> deltas;       // ring detunings delta_n = omega_n - omega_0, size N (empty = resonant)
    double gamma0 = 0.0;              // TLS free-space decay
    double gamma_c = 0.0;             // per-ring radiation loss
    std::vector<double> backscatter;  // intra-ring cw<->ccw coupling h_n, size N (empty = none)

    bool ideal() const {
        if (gamma0 != 0.0 || gamma_c != 0.0) return false;
        for (double d : deltas) if (d != 0.0) return false;
        for (double h : backscatter) if (h != 0.0) return false;
        return true;
    }

    void validate() const {
        if (n_rings < 1) throw validation_error("NodeConfig: n_rings must be >= 1");
        if (!(g > 0.0)) throw validation_error("NodeConfig: g must be > 0");
        if (!(kappa > 0.0)) throw validation_error("NodeConfig: kappa must be > 0");
        if (j_rates.size() != n_rings - 1)
            throw validation_error("NodeConfig: j_rates must have n_rings-1 entries, got " +
                                   std::to_string(j_rates.size()));
        for (std::size_t i = 0; i < j_rates.size(); ++i)
            if (!(j_rates[i] > 0.0))
                throw validation_error("NodeConfig: j_rates[" + std::to_string(i) + "] must be > 0");
        if (!deltas.empty() && deltas.size() != n_rings)
            throw validation_error("NodeConfig: deltas must be empty or have n_rings entries");
        if (gamma0 < 0.0) throw validation_error("NodeConfig: gamma0 must be >= 0");
        if (gamma_c < 0.0) throw validation_error("NodeConfig: gamma_c must be >= 0");
        if (!backscatter.empty() && backscatter.size() != n_rings)
            throw validation_error("NodeConfig: backscatter must be empty or have n_rings entries");
    }

    // Same node with all rates divided by g; dynamics depend only on these ratios.
    NodeConfig normalized() const {
        NodeConfig c = *this;
        if (g == 1.0) return c;
        c.g = 1.0;
        for (double& j : c.j_rates) j /= g;
        c.kappa /= g;
        for (double& d : c.deltas) d /= g;
        c.gamma0 /= g;
        c.gamma_c /= g;
        for (double& h : c.backscatter) h /= g;
        return c;
    }

    double delta(std::size_t ring) const {  // 1-based ring index
        return deltas.empty() ? 0.0 : deltas[ring - 1];
    }
    double h(std::size_t ring) const {
        return backscatter.empty() ? 0.0 : backscatter[ring - 1];
    }
};

inline nlohmann::json to_json(const NodeConfig& c) {
    return nlohmann::json{{"n_rings", c.n_rings}, {"g", c.g},           {"j_rates", c.j_rates},
                          {"kappa", c.kappa},     {"deltas", c.deltas}, {"gamma0", c.gamma0},
                          {"gamma_c", c.gamma_c}, {"backscatter", c.backscatter}};
}

inline NodeConfig node_config_from_json(const nlohmann::json& j) {
    static const char* known[] = {"n_rings", "g",      "j_rates", "kappa",
                                  "deltas",  "gamma0", "gamma_c", "backscatter"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : known) ok = ok || (it.key() == k);
        if (!ok) throw validation_error("NodeConfig: unknown key '" + it.key() + "'");
    }
    NodeConfig c;
    if (!j.contains("n_rings")) throw validation_error("NodeConfig: missing key 'n_rings'");
    if (!j.contains("kappa")) throw validation_error("NodeConfig: missing key 'kappa'");
    c.n_rings = j.at("n_rings").get<std::size_t>();
    c.g = j.value("g", 1.0);
    c.j_rates = j.value("j_rates", std::vector<double>{});
    c.kappa = j.at("kappa").get<double>();
    c.deltas = j.value("deltas", std::vector<double>{});
    c.gamma0 = j.value("gamma0", 0.0);
    c.gamma_c = j.value("gamma_c", 0.0);
    c.backscatter = j.value("backscatter", std::vector<double>{});
    c.validate();
    return c;
}

} // namespace qpn
