// hamiltonian.hpp — effective non-Hermitian Hamiltonians of the single
// excitation sector.
//
// Reduced model, basis (TLS, ring 1..N): tridiagonal, off-diagonal
// (sqrt(2) g, J_12, ..., J_{N-1,N}), diagonal (-i G0/2, d_1 - i Gc/2, ...,
// d_N - i Gc/2 - i kappa/2).
//
// Full model, basis (TLS, a_1..a_N, b_1..b_N): the TLS couples with g to both
// a_1 and b_1, rings couple in the alternating pattern a_n<->b_{n+1} and
// b_n<->a_{n+1}, both a_N and b_N carry -i kappa/2, and h_n couples a_n<->b_n.

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "qpn/config.hpp"
#include "qpn/mat.hpp"

namespace qpn {

enum class ModelKind { reduced, full };

struct EffectiveHamiltonian {
    ModelKind model_kind = ModelKind::reduced;
    std::size_t dim = 0;
    CMat entries;
    std::vector<std::string> basis_labels;
};

inline EffectiveHamiltonian build_reduced_hamiltonian(const NodeConfig& config) {
    config.validate();
    const NodeConfig c = config.normalized();
    const std::size_t n = c.n_rings;

    EffectiveHamiltonian h;
    h.model_kind = ModelKind::reduced;
    h.dim = n + 1;
    h.entries = CMat(n + 1, n + 1);
    h.basis_labels.push_back("tls");
    for (std::size_t r = 1; r <= n; ++r) h.basis_labels.push_back("ring" + std::to_string(r));

    CMat& m = h.entries;
    m(0, 1) = m(1, 0) = std::sqrt(2.0) * c.g;
    for (std::size_t r = 1; r < n; ++r) m(r, r + 1) = m(r + 1, r) = c.j_rates[r - 1];
    m(0, 0) = cplx{0.0, -0.5 * c.gamma0};
    for (std::size_t r = 1; r <= n; ++r) m(r, r) = cplx{c.delta(r), -0.5 * c.gamma_c};
    m(n, n) += cplx{0.0, -0.5 * c.kappa};
    return h;
}

inline EffectiveHamiltonian build_full_hamiltonian(const NodeConfig& config) {
    config.validate();
    const NodeConfig c = config.normalized();
    const std::size_t n = c.n_rings;
    const auto ia = [](std::size_t ring) { return ring; };          // a_ring, 1-based
    const auto ib = [n](std::size_t ring) { return n + ring; };     // b_ring

    EffectiveHamiltonian h;
    h.model_kind = ModelKind::full;
    h.dim = 2 * n + 1;
    h.entries = CMat(h.dim, h.dim);
    h.basis_labels.push_back("tls");
    for (std::size_t r = 1; r <= n; ++r) h.basis_labels.push_back("a" + std::to_string(r));
    for (std::size_t r = 1; r <= n; ++r) h.basis_labels.push_back("b" + std::to_string(r));

    CMat& m = h.entries;
    m(0, ia(1)) = m(ia(1), 0) = c.g;
    m(0, ib(1)) = m(ib(1), 0) = c.g;
    for (std::size_t r = 1; r < n; ++r) {
        const double j = c.j_rates[r - 1];
        m(ia(r), ib(r + 1)) = m(ib(r + 1), ia(r)) = j;
        m(ib(r), ia(r + 1)) = m(ia(r + 1), ib(r)) = j;
    }
    m(0, 0) = cplx{0.0, -0.5 * c.gamma0};
    for (std::size_t r = 1; r <= n; ++r) {
        m(ia(r), ia(r)) = cplx{c.delta(r), -0.5 * c.gamma_c};
        m(ib(r), ib(r)) = cplx{c.delta(r), -0.5 * c.gamma_c};
        if (c.h(r) != 0.0) m(ia(r), ib(r)) = m(ib(r), ia(r)) = c.h(r);
    }
    m(ia(n), ia(n)) += cplx{0.0, -0.5 * c.kappa};
    m(ib(n), ib(n)) += cplx{0.0, -0.5 * c.kappa};
    return h;
}

} // namespace qpn
