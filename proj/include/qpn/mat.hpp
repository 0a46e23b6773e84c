// mat.hpp — small dense complex matrices (dim <= 9 in this project) with the
// handful of direct operations the eigensolver and reconstruction checks need.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "qpn/errors.hpp"

namespace qpn {

using cplx = std::complex<double>;

class CMat {
public:
    CMat() = default;
    CMat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}

    static CMat identity(std::size_t n) {
        CMat m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    cplx& operator()(std::size_t i, std::size_t j) noexcept { return a_[i * cols_ + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const noexcept { return a_[i * cols_ + j]; }

    const std::vector<cplx>& data() const noexcept { return a_; }

    CMat operator*(const CMat& rhs) const {
        if (cols_ != rhs.rows_) throw validation_error("CMat multiply: dimension mismatch");
        CMat out(rows_, rhs.cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t k = 0; k < cols_; ++k) {
                const cplx aik = (*this)(i, k);
                if (aik == cplx{}) continue;
                for (std::size_t j = 0; j < rhs.cols_; ++j)
                    out(i, j) += aik * rhs(k, j);
            }
        return out;
    }

    CMat operator-(const CMat& rhs) const {
        if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
            throw validation_error("CMat subtract: dimension mismatch");
        CMat out(rows_, cols_);
        for (std::size_t i = 0; i < a_.size(); ++i) out.a_[i] = a_[i] - rhs.a_[i];
        return out;
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<cplx> a_;
};

inline double frobenius_norm(const CMat& m) {
    double s = 0.0;
    for (const cplx& z : m.data()) s += std::norm(z);
    return std::sqrt(s);
}

// Apply a column vector: y = m x
inline std::vector<cplx> matvec(const CMat& m, const std::vector<cplx>& x) {
    std::vector<cplx> y(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        cplx acc{};
        for (std::size_t j = 0; j < m.cols(); ++j) acc += m(i, j) * x[j];
        y[i] = acc;
    }
    return y;
}

// Gauss-Jordan inverse with partial pivoting. Fine at these dimensions.
inline CMat inverse(const CMat& m) {
    if (m.rows() != m.cols()) throw validation_error("inverse: matrix not square");
    const std::size_t n = m.rows();
    CMat a = m;
    CMat inv = CMat::identity(n);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        double best = std::abs(a(col, col));
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a(r, col)) > best) { best = std::abs(a(r, col)); piv = r; }
        if (best == 0.0) throw numerical_error("inverse: singular matrix");
        if (piv != col)
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(a(piv, j), a(col, j));
                std::swap(inv(piv, j), inv(col, j));
            }
        const cplx d = a(col, col);
        for (std::size_t j = 0; j < n; ++j) { a(col, j) /= d; inv(col, j) /= d; }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const cplx f = a(r, col);
            if (f == cplx{}) continue;
            for (std::size_t j = 0; j < n; ++j) {
                a(r, j) -= f * a(col, j);
                inv(r, j) -= f * inv(col, j);
            }
        }
    }
    return inv;
}

} // namespace qpn
