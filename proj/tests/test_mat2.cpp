#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "tomocal/mat2.hpp"

using namespace tomocal;

TEST_SUITE("mat2") {

TEST_CASE("identity and pauli algebra") {
    const Mat2 i = Mat2::identity();
    CHECK(approx_equal(pauli_x() * pauli_x(), i, 1e-15));
    CHECK(approx_equal(pauli_y() * pauli_y(), i, 1e-15));
    CHECK(approx_equal(pauli_z() * pauli_z(), i, 1e-15));
    // sx sy = i sz
    CHECK(approx_equal(pauli_x() * pauli_y(), cplx(0, 1) * pauli_z(), 1e-15));
    CHECK(pauli_x().trace() == cplx(0.0));
}

TEST_CASE("adjoint and trace") {
    const Mat2 m{cplx(1, 2), cplx(3, -1), cplx(0, 4), cplx(-2, 0.5)};
    const Mat2 a = m.adjoint();
    CHECK(a.e[0] == std::conj(m.e[0]));
    CHECK(a.e[1] == std::conj(m.e[2]));
    CHECK(m.trace() == m.e[0] + m.e[3]);
    CHECK(std::abs((m * a).trace().real() - m.frobenius_norm() * m.frobenius_norm()) < 1e-12);
}

TEST_CASE("determinant") {
    const Mat2 m{2.0, 1.0, 1.0, 2.0};
    CHECK(std::abs(m.det() - cplx(3.0)) < 1e-15);
}

TEST_CASE("hermitian eigenvalues are roots of the characteristic polynomial") {
    const Mat2 m{1.5, cplx(0.3, -0.7), cplx(0.3, 0.7), -0.5};
    const auto ev = hermitian_eigenvalues(m);
    CHECK(ev[0] <= ev[1]);
    for (double l : ev) {
        const cplx det = (m - cplx(l) * Mat2::identity()).det();
        CHECK(std::abs(det) < 1e-12);
    }
    CHECK(ev[0] + ev[1] == doctest::Approx(m.trace().real()).epsilon(1e-12));
}

TEST_CASE("hermiticity defect") {
    CHECK(hermiticity_defect(pauli_y()) < 1e-15);
    const Mat2 skew{0.0, cplx(0, 1), cplx(0, 1), 0.0};
    CHECK(hermiticity_defect(skew) > 1.0);
}

TEST_CASE("unitarity check") {
    CHECK(is_unitary(Mat2::identity(), 1e-12));
    CHECK(is_unitary(pauli_x(), 1e-12));
    CHECK(!is_unitary(2.0 * pauli_x(), 1e-12));
}

TEST_CASE("outer product") {
    const std::array<cplx, 2> k0{1.0, 0.0};
    const Mat2 p = outer(k0, k0);
    CHECK(p.e[0] == cplx(1.0));
    CHECK(p.e[3] == cplx(0.0));
    CHECK(approx_equal(p * p, p, 1e-15));
}

TEST_CASE("is_finite rejects nan") {
    Mat2 m = Mat2::identity();
    m.e[2] = cplx(std::nan(""), 0.0);
    CHECK(!m.is_finite());
}

}  // TEST_SUITE
