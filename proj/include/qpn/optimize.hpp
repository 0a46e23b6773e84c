// optimize.hpp — searches coupling-rate ratios (J_12..J_{N-1,N}, kappa)/g for
// maximal pulse symmetry: exhaustive grid sweeps and a derivative-free
// Nelder-Mead refinement. The objective uses the analytic eigenmode pulse
// (microseconds per point) and falls back to ODE integration when the
// spectrum degenerates.

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "qpn/dynamics.hpp"
#include "qpn/metrics.hpp"
#include "qpn/spectral.hpp"

namespace qpn {

struct BetaEvalOptions {
    std::size_t n_samples = 1024;
    double t_min = 20.0;
    double bound_lo = 0.0;   // exclusive
    double bound_hi = 20.0;  // inclusive
};

inline NodeConfig config_from_ratios(std::span<const double> params, std::size_t n_rings) {
    if (params.size() != n_rings)
        throw validation_error("config_from_ratios: expected n_rings ratio values (J..., kappa)");
    NodeConfig c;
    c.n_rings = n_rings;
    c.g = 1.0;
    c.j_rates.assign(params.begin(), params.end() - 1);
    c.kappa = params.back();
    return c;
}

// beta for ratio parameters; -inf outside the (bound_lo, bound_hi] box.
inline double beta_objective(std::span<const double> params, std::size_t n_rings,
                             const BetaEvalOptions& opt = {}) {
    for (double p : params)
        if (!(p > opt.bound_lo) || p > opt.bound_hi)
            return -std::numeric_limits<double>::infinity();
    const NodeConfig cfg = config_from_ratios(params, n_rings);
    try {
        EigenDecomposition eig =
            modal_amplitudes(cfg, eigendecompose(build_reduced_hamiltonian(cfg)));
        const double window = recommended_emission_window(eig, opt.t_min);
        const TimeGrid grid{0.0, window, opt.n_samples};
        const Pulse pulse =
            make_pulse(grid, sample_modal_sum(eig.modal_amplitudes, eig.eigenvalues, grid));
        return symmetry_factor(pulse).beta;
    } catch (const degenerate_spectrum_error&) {
        const EigenDecomposition eig = eigendecompose(build_reduced_hamiltonian(cfg));
        const double window = recommended_emission_window(eig, opt.t_min);
        const TimeGrid grid{0.0, window, opt.n_samples};
        return symmetry_factor(evolve_emission(cfg, grid).emitted).beta;
    }
}

// ------------------------------- grid sweep ---------------------------------

struct ParamRange {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t count = 1;

    double at(std::size_t k) const {
        if (count == 1) return lo;
        return lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1);
    }
};

struct SweepSpec {
    std::size_t n_rings = 3;
    std::vector<ParamRange> ranges;  // one per ratio: J12.., kappa
    std::size_t grid_guard = 10'000'000;
    BetaEvalOptions objective{};

    void validate() const {
        if (ranges.size() != n_rings)
            throw validation_error("SweepSpec: expected n_rings ranges (J..., kappa)");
        std::size_t total = 1;
        for (const auto& r : ranges) {
            if (!(r.lo > 0.0) || !(r.hi >= r.lo))
                throw validation_error("SweepSpec: ranges must be positive with hi >= lo");
            if (r.count < 1) throw validation_error("SweepSpec: range count must be >= 1");
            if (total > grid_guard / r.count)
                throw validation_error("SweepSpec: grid size exceeds the guard of " +
                                       std::to_string(grid_guard) + " points");
            total *= r.count;
        }
    }

    std::size_t total_points() const {
        std::size_t total = 1;
        for (const auto& r : ranges) total *= r.count;
        return total;
    }

    // flat index -> parameter vector, last axis fastest
    std::vector<double> params_at(std::size_t flat) const {
        std::vector<double> p(ranges.size());
        for (std::size_t axis = ranges.size(); axis-- > 0;) {
            const std::size_t c = ranges[axis].count;
            p[axis] = ranges[axis].at(flat % c);
            flat /= c;
        }
        return p;
    }
};

struct SweepResult {
    SweepSpec spec;
    std::vector<double> beta;  // indexed by SweepSpec flat order
};

inline SweepResult grid_sweep(const SweepSpec& spec, std::size_t workers = 0) {
    spec.validate();
    const std::size_t total = spec.total_points();
    SweepResult out;
    out.spec = spec;
    out.beta.assign(total, 0.0);

    if (workers == 0) {
        const unsigned hc = std::thread::hardware_concurrency();
        workers = hc > 0 ? hc : 1;
    }
    workers = std::min<std::size_t>(workers, total);

    std::atomic<std::size_t> cursor{0};
    auto worker = [&]() {
        constexpr std::size_t chunk = 32;
        for (;;) {
            const std::size_t begin = cursor.fetch_add(chunk);
            if (begin >= total) return;
            const std::size_t end = std::min(begin + chunk, total);
            for (std::size_t i = begin; i < end; ++i) {
                const std::vector<double> p = spec.params_at(i);
                out.beta[i] = beta_objective(p, spec.n_rings, spec.objective);
            }
        }
    };
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return out;
}

// ------------------------------ Nelder-Mead ---------------------------------

struct RefineOptions {
    std::size_t max_evals = 2000;
    double simplex_tol = 1e-4;      // converged when the simplex diameter drops below
    double beta_spread_tol = 1e-7;  // ... and the objective spread below
    BetaEvalOptions objective{.n_samples = 2048};
    std::uint64_t seed = 0;  // drives the boundary-restart perturbation only
};

struct TracePoint {
    std::size_t eval = 0;
    std::vector<double> params;
    double beta = 0.0;
};

struct OptimumReport {
    std::vector<double> best_params;
    double best_beta = 0.0;
    std::vector<cplx> eigenvalues;  // spectrum at the optimum
    std::vector<TracePoint> trace;  // best-so-far improvements
    std::size_t n_evals = 0;
    bool converged = false;
    bool restarted = false;
    std::vector<std::string> warnings;
};

namespace detail {

struct NmState {
    std::vector<std::vector<double>> x;
    std::vector<double> f;  // -beta
    std::size_t evals = 0;
};

inline void nelder_mead(std::vector<double> start, std::size_t n_rings,
                        const RefineOptions& opt, OptimumReport& rep) {
    const std::size_t dim = start.size();
    auto eval = [&](const std::vector<double>& p) {
        const double beta = beta_objective(p, n_rings, opt.objective);
        ++rep.n_evals;
        if (beta > rep.best_beta) {
            rep.best_beta = beta;
            rep.best_params = p;
            rep.trace.push_back({rep.n_evals, p, beta});
        }
        return -beta;
    };

    std::vector<std::vector<double>> x(dim + 1, start);
    for (std::size_t i = 0; i < dim; ++i) x[i + 1][i] *= 1.05;
    std::vector<double> f(dim + 1);
    for (std::size_t v = 0; v <= dim; ++v) f[v] = eval(x[v]);

    const double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;
    while (rep.n_evals < opt.max_evals) {
        // order vertices
        std::vector<std::size_t> idx(dim + 1);
        for (std::size_t i = 0; i <= dim; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return f[a] < f[b]; });
        {
            std::vector<std::vector<double>> x2(dim + 1);
            std::vector<double> f2(dim + 1);
            for (std::size_t i = 0; i <= dim; ++i) { x2[i] = x[idx[i]]; f2[i] = f[idx[i]]; }
            x.swap(x2);
            f.swap(f2);
        }

        double diam = 0.0;
        for (std::size_t v = 1; v <= dim; ++v) {
            double d = 0.0;
            for (std::size_t i = 0; i < dim; ++i) d += (x[v][i] - x[0][i]) * (x[v][i] - x[0][i]);
            diam = std::max(diam, std::sqrt(d));
        }
        if (diam < opt.simplex_tol && (f[dim] - f[0]) < opt.beta_spread_tol) {
            rep.converged = true;
            return;
        }

        std::vector<double> centroid(dim, 0.0);
        for (std::size_t v = 0; v < dim; ++v)
            for (std::size_t i = 0; i < dim; ++i) centroid[i] += x[v][i] / static_cast<double>(dim);

        auto blend = [&](double coef, const std::vector<double>& away) {
            std::vector<double> p(dim);
            for (std::size_t i = 0; i < dim; ++i) p[i] = centroid[i] + coef * (centroid[i] - away[i]);
            return p;
        };

        const std::vector<double> xr = blend(alpha, x[dim]);
        const double fr = eval(xr);
        if (fr < f[0]) {
            const std::vector<double> xe = blend(gamma, x[dim]);
            const double fe = eval(xe);
            if (fe < fr) { x[dim] = xe; f[dim] = fe; }
            else         { x[dim] = xr; f[dim] = fr; }
        } else if (fr < f[dim - 1]) {
            x[dim] = xr;
            f[dim] = fr;
        } else {
            const bool outside = fr < f[dim];
            const std::vector<double> xc = blend(outside ? rho : -rho, x[dim]);
            const double fc = eval(xc);
            if (fc < (outside ? fr : f[dim])) {
                x[dim] = xc;
                f[dim] = fc;
            } else {
                for (std::size_t v = 1; v <= dim; ++v) {
                    for (std::size_t i = 0; i < dim; ++i)
                        x[v][i] = x[0][i] + sigma * (x[v][i] - x[0][i]);
                    f[v] = eval(x[v]);
                    if (rep.n_evals >= opt.max_evals) return;
                }
            }
        }
    }
}

} // namespace detail

inline OptimumReport refine(std::span<const double> start, std::size_t n_rings,
                            const RefineOptions& opt = {}) {
    if (start.size() != n_rings)
        throw validation_error("refine: expected n_rings ratio values (J..., kappa)");
    for (double p : start)
        if (!(p > opt.objective.bound_lo) || p > opt.objective.bound_hi)
            throw validation_error("refine: start must lie inside (0, 20] per ratio");

    OptimumReport rep;
    rep.best_beta = -std::numeric_limits<double>::infinity();

    // simplex runs restart from the incumbent until a fresh simplex stops
    // improving; the landscape top is flat enough that a single run can stall
    // on the ridge with a tiny simplex
    std::vector<double> seed_pt(start.begin(), start.end());
    double prev_best = rep.best_beta;
    for (int round = 0; round < 8 && rep.n_evals < opt.max_evals; ++round) {
        rep.converged = false;
        detail::nelder_mead(seed_pt, n_rings, opt, rep);
        if (round > 0 && rep.best_beta - prev_best <= opt.beta_spread_tol) break;
        prev_best = rep.best_beta;
        seed_pt = rep.best_params;
    }

    // one re-seed from a 5% perturbation when the result sits on the box wall
    const double span = opt.objective.bound_hi - opt.objective.bound_lo;
    bool on_boundary = false;
    for (double p : rep.best_params)
        on_boundary = on_boundary || p < opt.objective.bound_lo + 1e-6 * span ||
                      p > opt.objective.bound_hi - 1e-6 * span;
    if (on_boundary && rep.n_evals < opt.max_evals) {
        rep.restarted = true;
        std::mt19937_64 rng(opt.seed);
        std::uniform_real_distribution<double> jitter(-0.05, 0.05);
        std::vector<double> wiggled = rep.best_params;
        for (double& p : wiggled)
            p = std::clamp(p * (1.0 + jitter(rng)), opt.objective.bound_lo + 1e-9 * span,
                           opt.objective.bound_hi);
        detail::nelder_mead(wiggled, n_rings, opt, rep);
    }

    if (!rep.converged) {
        rep.warnings.push_back("refine: not converged after " + std::to_string(rep.n_evals) +
                               " evaluations; returning best seen");
    }
    rep.eigenvalues =
        eigendecompose(build_reduced_hamiltonian(config_from_ratios(rep.best_params, n_rings)))
            .eigenvalues;
    return rep;
}

} // namespace qpn
