#pragma once
// Qubit states, effects, rotations and Born-rule probabilities.
//
// Sign conventions used throughout the project:
//   R_j(a) = exp(+i sigma_j a/2)          (Pauli-generated rotation)
//   W(alpha, G) = |a><a| + e^{-iG}|a_perp><a_perp|   (waveplate)
// All other modules build operators through these constructors so the
// conventions cannot diverge.

#include <algorithm>
#include <numbers>
#include <optional>

#include "tomocal/mat2.hpp"

namespace tomocal {

inline constexpr double kHermTol = 1e-10;    // Hermiticity / trace checks
inline constexpr double kUnitaryTol = 1e-12;  // unitarity of 2x2 products

enum class Axis { y, z };

struct BlochVector {
    double x = 0.0, y = 0.0, z = 0.0;
    double norm() const { return std::sqrt(x * x + y * y + z * z); }
};

struct BlochAngles {
    double theta = 0.0;  // colatitude, [0, pi]
    double phi = 0.0;    // longitude, [0, 2pi)
};

// Unit-norm two-component state vector.
struct PureState {
    std::array<cplx, 2> amp{cplx(1.0), cplx(0.0)};
    std::optional<BlochAngles> angles;

    PureState() = default;
    PureState(cplx a0, cplx a1) : amp{a0, a1} {
        const double n = std::sqrt(std::norm(amp[0]) + std::norm(amp[1]));
        if (!(std::abs(n - 1.0) <= 1e-12))
            throw std::invalid_argument("PureState: amplitudes not unit norm");
    }

    Mat2 projector() const { return outer(amp, amp); }
    BlochVector bloch() const {
        const cplx c = std::conj(amp[0]) * amp[1];
        return {2.0 * c.real(), 2.0 * c.imag(),
                std::norm(amp[0]) - std::norm(amp[1])};
    }
};

// Hermitian, PSD, unit-trace.
struct DensityMatrix {
    Mat2 m = {0.5, 0.0, 0.0, 0.5};

    DensityMatrix() = default;
    explicit DensityMatrix(const Mat2& mat) : m(mat) {
        if (!m.is_finite() || hermiticity_defect(m) > kHermTol)
            throw std::invalid_argument("DensityMatrix: not Hermitian");
        if (std::abs(m.trace().real() - 1.0) > kHermTol)
            throw std::invalid_argument("DensityMatrix: trace != 1");
        if (hermitian_eigenvalues(m)[0] < -kHermTol)
            throw std::invalid_argument("DensityMatrix: negative eigenvalue");
    }

    static DensityMatrix from_pure(const PureState& psi) {
        return DensityMatrix(psi.projector());
    }
    static DensityMatrix from_bloch(const BlochVector& v) {
        return DensityMatrix(0.5 * (Mat2::identity() + cplx(v.x) * pauli_x() +
                                    cplx(v.y) * pauli_y() + cplx(v.z) * pauli_z()));
    }
    static DensityMatrix maximally_mixed() { return DensityMatrix{}; }
};

// Hermitian with eigenvalues in [0, 1].
struct Effect {
    Mat2 m = Mat2::identity();

    Effect() = default;
    explicit Effect(const Mat2& mat) : m(mat) {
        if (!m.is_finite() || hermiticity_defect(m) > kHermTol)
            throw std::invalid_argument("Effect: not Hermitian");
        const auto ev = hermitian_eigenvalues(m);
        if (ev[0] < -kHermTol || ev[1] > 1.0 + kHermTol)
            throw std::invalid_argument("Effect: eigenvalues outside [0,1]");
    }
};

// exp(+i sigma_axis angle/2)
inline Mat2 pauli_rotation(Axis axis, double angle) {
    if (!std::isfinite(angle)) throw std::invalid_argument("pauli_rotation: non-finite angle");
    const double c = std::cos(0.5 * angle), s = std::sin(0.5 * angle);
    if (axis == Axis::y) return {c, s, -s, c};
    return {cplx(c, s), 0.0, 0.0, cplx(c, -s)};
}

// W(alpha, Gamma) with linear eigenaxis at angle alpha from |0>.
inline Mat2 waveplate_unitary(double alpha, double retardance) {
    if (!std::isfinite(alpha) || !std::isfinite(retardance))
        throw std::invalid_argument("waveplate_unitary: non-finite input");
    const std::array<cplx, 2> fast{std::cos(alpha), std::sin(alpha)};
    const std::array<cplx, 2> slow{-std::sin(alpha), std::cos(alpha)};
    return outer(fast, fast) + std::exp(cplx(0, -retardance)) * outer(slow, slow);
}

inline PureState state_from_angles(double theta, double phi) {
    if (!(theta >= 0.0 && theta <= std::numbers::pi))
        throw std::invalid_argument("state_from_angles: theta outside [0, pi]");
    PureState s(std::cos(0.5 * theta), std::exp(cplx(0, phi)) * std::sin(0.5 * theta));
    s.angles = BlochAngles{theta, phi};
    return s;
}

inline BlochVector bloch_vector(const DensityMatrix& rho) {
    return {(rho.m * pauli_x()).trace().real(), (rho.m * pauli_y()).trace().real(),
            (rho.m * pauli_z()).trace().real()};
}

inline double purity(const DensityMatrix& rho) {
    return (rho.m * rho.m).trace().real();
}

// <psi| rho |psi>
inline double fidelity_pure(const PureState& psi, const DensityMatrix& rho) {
    const auto& a = psi.amp;
    cplx f = std::conj(a[0]) * (rho.m.e[0] * a[0] + rho.m.e[1] * a[1]) +
             std::conj(a[1]) * (rho.m.e[2] * a[0] + rho.m.e[3] * a[1]);
    return f.real();
}

// Tr(rho e), clamped to [0, 1].
inline double born_probability(const DensityMatrix& rho, const Effect& e) {
    const double p = (rho.m * e.m).trace().real();
    return std::clamp(p, 0.0, 1.0);
}

// (1/2) sum |eigs(a - b)|
inline double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
    const auto ev = hermitian_eigenvalues(a.m - b.m);
    return 0.5 * (std::abs(ev[0]) + std::abs(ev[1]));
}

}  // namespace tomocal
