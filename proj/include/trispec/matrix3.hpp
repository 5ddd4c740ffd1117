#pragma once

#include <array>
#include <cmath>
#include <complex>

namespace trispec {

using cplx = std::complex<double>;

/// 3x3 complex matrix, row-major. Carrier of the fundamental matrix M(x,lambda)
/// and of the model matrices Omega, X, A.
struct Matrix3C {
    std::array<cplx, 9> a{};

    static Matrix3C identity() {
        Matrix3C m;
        m.a[0] = m.a[4] = m.a[8] = 1.0;
        return m;
    }

    cplx& operator()(int r, int c) { return a[3 * r + c]; }
    const cplx& operator()(int r, int c) const { return a[3 * r + c]; }

    Matrix3C operator+(const Matrix3C& o) const {
        Matrix3C r;
        for (int i = 0; i < 9; ++i) r.a[i] = a[i] + o.a[i];
        return r;
    }
    Matrix3C operator-(const Matrix3C& o) const {
        Matrix3C r;
        for (int i = 0; i < 9; ++i) r.a[i] = a[i] - o.a[i];
        return r;
    }
    Matrix3C operator*(const Matrix3C& o) const {
        Matrix3C r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                cplx s = 0.0;
                for (int k = 0; k < 3; ++k) s += (*this)(i, k) * o(k, j);
                r(i, j) = s;
            }
        return r;
    }
    Matrix3C operator*(cplx s) const {
        Matrix3C r;
        for (int i = 0; i < 9; ++i) r.a[i] = a[i] * s;
        return r;
    }
    Matrix3C& operator+=(const Matrix3C& o) {
        for (int i = 0; i < 9; ++i) a[i] += o.a[i];
        return *this;
    }

    cplx det() const {
        const auto& m = *this;
        return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1))
             - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
             + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    }

    Matrix3C inverse() const {
        const auto& m = *this;
        Matrix3C r;
        r(0, 0) = m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
        r(0, 1) = m(0, 2) * m(2, 1) - m(0, 1) * m(2, 2);
        r(0, 2) = m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1);
        r(1, 0) = m(1, 2) * m(2, 0) - m(1, 0) * m(2, 2);
        r(1, 1) = m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0);
        r(1, 2) = m(0, 2) * m(1, 0) - m(0, 0) * m(1, 2);
        r(2, 0) = m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0);
        r(2, 1) = m(0, 1) * m(2, 0) - m(0, 0) * m(2, 1);
        r(2, 2) = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
        const cplx d = det();
        for (auto& v : r.a) v /= d;
        return r;
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& v : a) m = std::max(m, std::abs(v));
        return m;
    }

    double max_abs_imag() const {
        double m = 0.0;
        for (const auto& v : a) m = std::max(m, std::abs(v.imag()));
        return m;
    }

    Matrix3C conj() const {
        Matrix3C r;
        for (int i = 0; i < 9; ++i) r.a[i] = std::conj(a[i]);
        return r;
    }
};

inline Matrix3C operator*(cplx s, const Matrix3C& m) { return m * s; }

inline double max_abs_diff(const Matrix3C& x, const Matrix3C& y) {
    double m = 0.0;
    for (int i = 0; i < 9; ++i) m = std::max(m, std::abs(x.a[i] - y.a[i]));
    return m;
}

}  // namespace trispec
