// eigensolver.hpp — dense complex non-Hermitian eigensolver for tiny matrices.
//
// Householder reduction to upper Hessenberg form, then explicit single-shift
// QR iteration (Wilkinson shift, Givens rotations) to Schur form, then right
// eigenvectors by back substitution on the triangular factor. No external
// linear-algebra dependency; dimensions here never exceed 9.

#pragma once

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <string>
#include <vector>

#include "qpn/mat.hpp"

namespace qpn {

struct DenseEigen {
    std::vector<cplx> values;     // Schur order (unsorted)
    CMat vectors;                 // right eigenvectors, column k for values[k]
    double reconstruction_error;  // ||V D V^-1 - A||_F / ||A||_F
    double vector_condition;      // ||V||_F * ||V^-1||_F
    int qr_iterations;
};

namespace detail {

// A <- P A P with P = I - 2 v v^H, Q <- Q P; reduces column k below the subdiagonal.
inline void hessenberg_reduce(CMat& a, CMat& q) {
    const std::size_t n = a.rows();
    if (n < 3) return;
    std::vector<cplx> v(n);
    for (std::size_t k = 0; k + 2 < n; ++k) {
        double xnorm = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) xnorm += std::norm(a(i, k));
        xnorm = std::sqrt(xnorm);
        if (xnorm == 0.0) continue;
        cplx x0 = a(k + 1, k);
        cplx alpha = (x0 == cplx{}) ? cplx{-xnorm, 0.0} : -(x0 / std::abs(x0)) * xnorm;
        double vnorm2 = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) {
            v[i] = a(i, k);
            if (i == k + 1) v[i] -= alpha;
            vnorm2 += std::norm(v[i]);
        }
        if (vnorm2 == 0.0) continue;
        const double inv = 1.0 / std::sqrt(vnorm2);
        for (std::size_t i = k + 1; i < n; ++i) v[i] *= inv;

        // rows k+1..n-1 of all columns: a -= 2 v (v^H a)
        for (std::size_t j = 0; j < n; ++j) {
            cplx dot{};
            for (std::size_t i = k + 1; i < n; ++i) dot += std::conj(v[i]) * a(i, j);
            dot *= 2.0;
            for (std::size_t i = k + 1; i < n; ++i) a(i, j) -= v[i] * dot;
        }
        // columns k+1..n-1 of all rows: a -= 2 (a v) v^H
        for (std::size_t i = 0; i < n; ++i) {
            cplx dot{};
            for (std::size_t j = k + 1; j < n; ++j) dot += a(i, j) * v[j];
            dot *= 2.0;
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= dot * std::conj(v[j]);
        }
        for (std::size_t i = 0; i < n; ++i) {
            cplx dot{};
            for (std::size_t j = k + 1; j < n; ++j) dot += q(i, j) * v[j];
            dot *= 2.0;
            for (std::size_t j = k + 1; j < n; ++j) q(i, j) -= dot * std::conj(v[j]);
        }
    }
}

// Eigenvalue of [[a,b],[c,d]] closest to d (Wilkinson shift).
inline cplx wilkinson_shift(cplx a, cplx b, cplx c, cplx d) {
    const cplx tr = a + d;
    const cplx det = a * d - b * c;
    const cplx disc = std::sqrt(tr * tr - 4.0 * det);
    const cplx l1 = 0.5 * (tr + disc);
    const cplx l2 = 0.5 * (tr - disc);
    return (std::abs(l1 - d) < std::abs(l2 - d)) ? l1 : l2;
}

// Shifted QR sweeps on an upper Hessenberg matrix; returns iteration count.
inline int schur_qr(CMat& h, CMat& q, int max_iter_per_eig = 60) {
    const std::size_t n = h.rows();
    const double eps = DBL_EPSILON;
    double hnorm = frobenius_norm(h);
    if (hnorm == 0.0) return 0;

    int total_iters = 0;
    std::size_t hi = n - 1;
    int since_deflation = 0;
    std::vector<cplx> gc(n), gs(n);

    while (hi > 0) {
        // deflate converged subdiagonals
        std::size_t lo = hi;
        while (lo > 0) {
            double small = eps * (std::abs(h(lo - 1, lo - 1)) + std::abs(h(lo, lo)));
            if (small == 0.0) small = eps * hnorm;
            if (std::abs(h(lo, lo - 1)) <= small) { h(lo, lo - 1) = 0.0; break; }
            --lo;
        }
        if (lo == hi) { --hi; since_deflation = 0; continue; }

        if (++total_iters > max_iter_per_eig * static_cast<int>(n))
            throw numerical_error("eigensolver: QR iteration did not converge");
        ++since_deflation;

        cplx mu;
        if (since_deflation % 12 == 0) {
            mu = h(hi, hi) + cplx{std::abs(h(hi, hi - 1)), 0.0};  // exceptional shift
        } else {
            mu = wilkinson_shift(h(hi - 1, hi - 1), h(hi - 1, hi), h(hi, hi - 1), h(hi, hi));
        }

        for (std::size_t i = lo; i <= hi; ++i) h(i, i) -= mu;

        // left pass: rows -> R, storing Givens pairs
        for (std::size_t k = lo; k < hi; ++k) {
            const cplx a = h(k, k), b = h(k + 1, k);
            const double r = std::sqrt(std::norm(a) + std::norm(b));
            cplx c{1.0, 0.0}, s{};
            if (r > 0.0) { c = a / r; s = b / r; }
            gc[k] = c; gs[k] = s;
            for (std::size_t j = k; j < n; ++j) {
                const cplx t1 = h(k, j), t2 = h(k + 1, j);
                h(k, j) = std::conj(c) * t1 + std::conj(s) * t2;
                h(k + 1, j) = -s * t1 + c * t2;
            }
            h(k + 1, k) = 0.0;
        }
        // right pass: columns, and accumulate q
        for (std::size_t k = lo; k < hi; ++k) {
            const cplx c = gc[k], s = gs[k];
            const std::size_t top = std::min(k + 2, hi) + 1;
            for (std::size_t i = 0; i < top; ++i) {
                const cplx t1 = h(i, k), t2 = h(i, k + 1);
                h(i, k) = t1 * c + t2 * s;
                h(i, k + 1) = -t1 * std::conj(s) + t2 * std::conj(c);
            }
            for (std::size_t i = 0; i < n; ++i) {
                const cplx t1 = q(i, k), t2 = q(i, k + 1);
                q(i, k) = t1 * c + t2 * s;
                q(i, k + 1) = -t1 * std::conj(s) + t2 * std::conj(c);
            }
        }
        for (std::size_t i = lo; i <= hi; ++i) h(i, i) += mu;
    }
    return total_iters;
}

// Right eigenvectors of the triangular factor, rotated back through q.
inline CMat schur_vectors(const CMat& t, const CMat& q) {
    const std::size_t n = t.rows();
    const double smallnum = DBL_EPSILON * std::max(frobenius_norm(t), 1.0);
    CMat v(n, n);
    std::vector<cplx> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::fill(y.begin(), y.end(), cplx{});
        y[i] = 1.0;
        for (std::size_t jj = i; jj-- > 0;) {
            cplx acc{};
            for (std::size_t k = jj + 1; k <= i; ++k) acc += t(jj, k) * y[k];
            cplx d = t(jj, jj) - t(i, i);
            if (std::abs(d) < smallnum) d = cplx{smallnum, 0.0};
            y[jj] = -acc / d;
        }
        double nrm = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            cplx acc{};
            for (std::size_t k = 0; k <= i; ++k) acc += q(r, k) * y[k];
            v(r, i) = acc;
            nrm += std::norm(acc);
        }
        nrm = std::sqrt(nrm);
        for (std::size_t r = 0; r < n; ++r) v(r, i) /= nrm;
    }
    return v;
}

} // namespace detail

inline DenseEigen eigen_decompose(const CMat& a) {
    if (a.rows() != a.cols() || a.rows() == 0)
        throw validation_error("eigen_decompose: matrix must be square and non-empty");
    const std::size_t n = a.rows();

    CMat h = a;
    CMat q = CMat::identity(n);
    DenseEigen out;
    if (n == 1) {
        out.values = {a(0, 0)};
        out.vectors = CMat::identity(1);
        out.reconstruction_error = 0.0;
        out.vector_condition = 1.0;
        out.qr_iterations = 0;
        return out;
    }

    detail::hessenberg_reduce(h, q);
    out.qr_iterations = detail::schur_qr(h, q);
    out.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.values[i] = h(i, i);
    out.vectors = detail::schur_vectors(h, q);

    // diagnostics: reconstruction V D V^-1 against the input
    CMat vinv = inverse(out.vectors);
    CMat vd(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) vd(i, j) = out.vectors(i, j) * out.values[j];
    const double anorm = frobenius_norm(a);
    out.reconstruction_error =
        (anorm > 0.0) ? frobenius_norm(vd * vinv - a) / anorm : frobenius_norm(vd * vinv);
    out.vector_condition = frobenius_norm(out.vectors) * frobenius_norm(vinv);
    return out;
}

} // namespace qpn
