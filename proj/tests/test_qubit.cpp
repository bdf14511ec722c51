#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "doctest.h"
#include "tomocal/qubit.hpp"

using namespace tomocal;

namespace {
constexpr double kPi = std::numbers::pi;

PureState random_pure(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return state_from_angles(std::acos(1.0 - 2.0 * u(rng)), 2 * kPi * u(rng));
}
}  // namespace

TEST_SUITE("qubit") {

TEST_CASE("pauli_rotation examples") {
    CHECK(approx_equal(pauli_rotation(Axis::y, 0.0), Mat2::identity(), 1e-15));
    // exp(i sy pi/2) = i sy = [[0,1],[-1,0]]
    const Mat2 ry = pauli_rotation(Axis::y, kPi);
    CHECK(std::abs(ry.e[0]) < 1e-15);
    CHECK(std::abs(ry.e[1] - cplx(1.0)) < 1e-15);
    CHECK(std::abs(ry.e[2] - cplx(-1.0)) < 1e-15);
    const Mat2 rz = pauli_rotation(Axis::z, kPi);
    CHECK(std::abs(rz.e[0] - cplx(0, 1)) < 1e-15);
    CHECK(std::abs(rz.e[3] - cplx(0, -1)) < 1e-15);
    CHECK_THROWS_AS(pauli_rotation(Axis::y, std::nan("")), std::invalid_argument);
}

TEST_CASE("pauli_rotation inverse property") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int i = 0; i < 50; ++i) {
        const double a = u(rng);
        for (Axis ax : {Axis::y, Axis::z}) {
            const Mat2 m = pauli_rotation(ax, a) * pauli_rotation(ax, -a);
            CHECK(approx_equal(m, Mat2::identity(), 1e-12));
            CHECK(is_unitary(pauli_rotation(ax, a), 1e-12));
        }
    }
}

TEST_CASE("waveplate_unitary examples") {
    const Mat2 hwp0 = waveplate_unitary(0.0, kPi);
    CHECK(approx_equal(hwp0, pauli_z(), 1e-12));
    // at pi/4 a half-wave plate is sigma_x up to global phase
    const Mat2 hwp45 = waveplate_unitary(kPi / 4, kPi);
    const cplx phase = hwp45.e[1];
    CHECK(std::abs(std::abs(phase) - 1.0) < 1e-12);
    CHECK(approx_equal((cplx(1.0) / phase) * hwp45, pauli_x(), 1e-12));
    CHECK(approx_equal(waveplate_unitary(0.7, 0.0), Mat2::identity(), 1e-12));
    CHECK_THROWS_AS(waveplate_unitary(std::nan(""), 1.0), std::invalid_argument);
}

TEST_CASE("half-wave plate is an involution up to phase") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-kPi, kPi);
    for (int i = 0; i < 50; ++i) {
        const Mat2 w = waveplate_unitary(u(rng), kPi);
        // eigenvalues {1, e^{-i pi}} = {1, -1}: a true involution
        CHECK(approx_equal(w * w, Mat2::identity(), 1e-12));
        CHECK(is_unitary(w, 1e-12));
    }
}

TEST_CASE("waveplate eigenvalues are {1, e^{-iG}}") {
    const double g = 1.234;
    const Mat2 w = waveplate_unitary(0.4, g);
    // eigenvectors are |a> and |a_perp>
    const std::array<cplx, 2> fast{std::cos(0.4), std::sin(0.4)};
    const cplx lam = (w.e[0] * fast[0] + w.e[1] * fast[1]) / fast[0];
    CHECK(std::abs(lam - cplx(1.0)) < 1e-12);
    CHECK(std::abs(w.det() - std::exp(cplx(0, -g))) < 1e-12);
}

TEST_CASE("state_from_angles examples") {
    const PureState h = state_from_angles(0.0, 1.0);
    CHECK(std::abs(h.amp[0] - cplx(1.0)) < 1e-15);
    const PureState v = state_from_angles(kPi, 0.0);
    CHECK(std::abs(v.amp[1] - cplx(1.0)) < 1e-15);
    const PureState r = state_from_angles(kPi / 2, kPi / 2);
    CHECK(std::abs(r.amp[0] - cplx(std::numbers::sqrt2 / 2)) < 1e-12);
    CHECK(std::abs(r.amp[1] - cplx(0, std::numbers::sqrt2 / 2)) < 1e-12);
    CHECK_THROWS_AS(state_from_angles(-0.1, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(state_from_angles(kPi + 0.1, 0.0), std::invalid_argument);
}

TEST_CASE("bloch_vector examples") {
    const BlochVector mixed = bloch_vector(DensityMatrix::maximally_mixed());
    CHECK(mixed.norm() < 1e-15);
    const BlochVector pole = bloch_vector(DensityMatrix::from_pure(state_from_angles(0, 0)));
    CHECK(pole.z == doctest::Approx(1.0).epsilon(1e-12));
    const BlochVector plus =
        bloch_vector(DensityMatrix::from_pure(state_from_angles(kPi / 2, 0.0)));
    CHECK(plus.x == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(plus.y) < 1e-12);
    CHECK(std::abs(plus.z) < 1e-12);
}

TEST_CASE("purity examples and bloch relation") {
    CHECK(purity(DensityMatrix::from_pure(state_from_angles(0, 0))) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(purity(DensityMatrix::maximally_mixed()) == doctest::Approx(0.5).epsilon(1e-12));
    const DensityMatrix r6 = DensityMatrix::from_bloch({0.6, 0.0, 0.0});
    CHECK(purity(r6) == doctest::Approx(0.68).epsilon(1e-12));

    std::mt19937_64 rng(3);
    for (int i = 0; i < 30; ++i) {
        const PureState psi = random_pure(rng);
        const DensityMatrix rho = DensityMatrix::from_pure(psi);
        CHECK(std::abs(purity(rho) - 1.0) < 1e-10);
        const double n = bloch_vector(rho).norm();
        CHECK(std::abs(n - 1.0) < 1e-10);
        CHECK(std::abs(purity(rho) - 0.5 * (1 + n * n)) < 1e-10);
    }
}

TEST_CASE("fidelity_pure examples") {
    const PureState zero = state_from_angles(0, 0);
    CHECK(fidelity_pure(zero, DensityMatrix::from_pure(zero)) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fidelity_pure(zero, DensityMatrix::from_pure(state_from_angles(kPi, 0))) ==
          doctest::Approx(0.0).epsilon(1e-12));
    CHECK(fidelity_pure(zero, DensityMatrix::maximally_mixed()) ==
          doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("born_probability examples and complement property") {
    const DensityMatrix zero = DensityMatrix::from_pure(state_from_angles(0, 0));
    const Effect pz(DensityMatrix::from_pure(state_from_angles(0, 0)).m);
    const Effect pp(DensityMatrix::from_pure(state_from_angles(kPi / 2, 0)).m);
    CHECK(born_probability(zero, pz) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(born_probability(zero, pp) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(born_probability(DensityMatrix::maximally_mixed(), pp) ==
          doctest::Approx(0.5).epsilon(1e-12));

    std::mt19937_64 rng(4);
    for (int i = 0; i < 30; ++i) {
        const DensityMatrix rho = DensityMatrix::from_pure(random_pure(rng));
        const Effect e(DensityMatrix::from_pure(random_pure(rng)).m);
        const Effect comp(Mat2::identity() - e.m);
        CHECK(std::abs(born_probability(rho, e) + born_probability(rho, comp) - 1.0) < 1e-12);
    }
}

TEST_CASE("invariant enforcement") {
    CHECK_THROWS_AS(PureState(cplx(1.0), cplx(1.0)), std::invalid_argument);
    CHECK_THROWS_AS(DensityMatrix{pauli_x()}, std::invalid_argument);       // trace 0
    CHECK_THROWS_AS(DensityMatrix(2.0 * Mat2::identity()), std::invalid_argument);
    CHECK_THROWS_AS(Effect(2.0 * Mat2::identity()), std::invalid_argument);  // eigenvalue 2
    CHECK_NOTHROW(Effect(0.5 * Mat2::identity()));
}

TEST_CASE("trace_distance basics") {
    const DensityMatrix a = DensityMatrix::from_pure(state_from_angles(0, 0));
    const DensityMatrix b = DensityMatrix::from_pure(state_from_angles(kPi, 0));
    CHECK(trace_distance(a, b) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(trace_distance(a, a) < 1e-15);
    CHECK(trace_distance(a, DensityMatrix::maximally_mixed()) ==
          doctest::Approx(0.5).epsilon(1e-12));
}

}  // TEST_SUITE
