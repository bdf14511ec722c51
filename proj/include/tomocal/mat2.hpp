#pragma once
// 2x2 complex matrix algebra. Everything in this project lives in a
// two-dimensional Hilbert space, so a hand-rolled value type beats a
// general-purpose linear algebra dependency.

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace tomocal {

using cplx = std::complex<double>;

// Row-major 2x2 complex matrix.
struct Mat2 {
    std::array<cplx, 4> e{};  // [ e[0] e[1] ; e[2] e[3] ]

    constexpr Mat2() = default;
    constexpr Mat2(cplx a, cplx b, cplx c, cplx d) : e{a, b, c, d} {}

    static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static constexpr Mat2 zero() { return {}; }

    cplx& operator()(int r, int c) { return e[2 * r + c]; }
    const cplx& operator()(int r, int c) const { return e[2 * r + c]; }

    Mat2 operator+(const Mat2& o) const {
        return {e[0] + o.e[0], e[1] + o.e[1], e[2] + o.e[2], e[3] + o.e[3]};
    }
    Mat2 operator-(const Mat2& o) const {
        return {e[0] - o.e[0], e[1] - o.e[1], e[2] - o.e[2], e[3] - o.e[3]};
    }
    Mat2 operator*(const Mat2& o) const {
        return {e[0] * o.e[0] + e[1] * o.e[2], e[0] * o.e[1] + e[1] * o.e[3],
                e[2] * o.e[0] + e[3] * o.e[2], e[2] * o.e[1] + e[3] * o.e[3]};
    }
    Mat2 operator*(cplx s) const { return {s * e[0], s * e[1], s * e[2], s * e[3]}; }
    friend Mat2 operator*(cplx s, const Mat2& m) { return m * s; }

    Mat2 adjoint() const {
        return {std::conj(e[0]), std::conj(e[2]), std::conj(e[1]), std::conj(e[3])};
    }
    cplx trace() const { return e[0] + e[3]; }
    cplx det() const { return e[0] * e[3] - e[1] * e[2]; }

    double frobenius_norm() const {
        double s = 0.0;
        for (const auto& z : e) s += std::norm(z);
        return std::sqrt(s);
    }

    bool approx_equal(const Mat2& o, double abs_tol) const {
        for (int i = 0; i < 4; ++i)
            if (std::abs(e[i] - o.e[i]) > abs_tol) return false;
        return true;
    }

    bool is_finite() const {
        for (const auto& z : e)
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
        return true;
    }
};

inline Mat2 pauli_x() { return {0.0, 1.0, 1.0, 0.0}; }
inline Mat2 pauli_y() { return {0.0, cplx(0, -1), cplx(0, 1), 0.0}; }
inline Mat2 pauli_z() { return {1.0, 0.0, 0.0, -1.0}; }

// Hermitian deviation ||M - M^dag||_max.
inline double hermiticity_defect(const Mat2& m) {
    double d = std::abs(m.e[0].imag());
    d = std::max(d, std::abs(m.e[3].imag()));
    d = std::max(d, std::abs(m.e[1] - std::conj(m.e[2])));
    return d;
}

// Eigenvalues of a (nearly) Hermitian matrix, ascending.
inline std::array<double, 2> hermitian_eigenvalues(const Mat2& m) {
    const double t = m.trace().real();
    const double half = 0.5 * t;
    const double disc = half * half - m.det().real();
    const double r = std::sqrt(std::max(disc, 0.0));
    return {half - r, half + r};
}

inline bool approx_equal(const Mat2& a, const Mat2& b, double abs_tol) {
    return a.approx_equal(b, abs_tol);
}

inline bool is_unitary(const Mat2& m, double tol) {
    return (m * m.adjoint()).approx_equal(Mat2::identity(), tol);
}

// ket |v> as a pair of amplitudes; |v><w|
inline Mat2 outer(const std::array<cplx, 2>& v, const std::array<cplx, 2>& w) {
    return {v[0] * std::conj(w[0]), v[0] * std::conj(w[1]),
            v[1] * std::conj(w[0]), v[1] * std::conj(w[1])};
}

}  // namespace tomocal
