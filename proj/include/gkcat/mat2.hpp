#pragma once

#include <cmath>
#include <complex>

namespace gkcat {

using Complex = std::complex<double>;

/// 2x2 complex matrix, row-major.  Frames produced by path transport are
/// elements of SL(2,C); the determinant is monitored, never renormalized.
struct Mat2 {
    Complex a{1.0}, b{0.0};
    Complex c{0.0}, d{1.0};

    static Mat2 identity() { return {}; }

    friend Mat2 operator*(const Mat2& x, const Mat2& y) {
        return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
                x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
    }

    Complex det() const { return a * d - b * c; }
    Complex trace() const { return a + d; }

    Mat2 adjugate() const { return {d, -b, -c, a}; }

    Mat2 inverse() const {
        const Complex s = 1.0 / det();
        return {d * s, -b * s, -c * s, a * s};
    }

    Mat2 conj() const {
        return {std::conj(a), std::conj(b), std::conj(c), std::conj(d)};
    }

    /// Conjugate transpose.
    Mat2 star() const {
        return {std::conj(a), std::conj(c), std::conj(b), std::conj(d)};
    }

    /// Largest entry magnitude.
    double max_abs() const {
        return std::max(std::max(std::abs(a), std::abs(b)),
                        std::max(std::abs(c), std::abs(d)));
    }
};

inline double max_abs_diff(const Mat2& x, const Mat2& y) {
    return std::max(std::max(std::abs(x.a - y.a), std::abs(x.b - y.b)),
                    std::max(std::abs(x.c - y.c), std::abs(x.d - y.d)));
}

inline double det_drift(const Mat2& m) { return std::abs(m.det() - 1.0); }

}  // namespace gkcat
