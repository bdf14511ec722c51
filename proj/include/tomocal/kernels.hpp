#pragma once
// Batched inner loops of the likelihood iteration.
//
// A Hermitian 2x2 matrix is packed into 4 reals
//     (m00, m11, sqrt2*Re m01, sqrt2*Im m01)
// which makes Tr(A*B) the plain dot product of the packed vectors. The
// reconstruction loop reduces to dot products against a list of packed
// effects plus one weighted accumulation, implemented here as a scalar
// reference kernel and an AVX2 variant selected at runtime.

#include <cstddef>
#include <string_view>

#include "tomocal/mat2.hpp"

namespace tomocal::kernels {

struct Packed {
    double v[4];
};

inline Packed pack(const Mat2& m) {
    constexpr double s2 = std::numbers::sqrt2;
    return {{m.e[0].real(), m.e[3].real(), s2 * m.e[1].real(), s2 * m.e[1].imag()}};
}

inline Mat2 unpack(const Packed& p) {
    constexpr double inv = 1.0 / std::numbers::sqrt2;
    const cplx off(inv * p.v[2], inv * p.v[3]);
    return {p.v[0], off, std::conj(off), p.v[1]};
}

struct Ops {
    // out[i] = dot(rho, eff + 4*i) for i in [0, n)
    void (*dot_batch)(const double* rho, const double* eff, std::size_t n, double* out);
    // acc[0..3] += sum_i w[i] * eff[4*i .. 4*i+3]
    void (*axpy_batch)(const double* eff, const double* w, std::size_t n, double* acc);
    const char* name;
};

const Ops& scalar_ops();
const Ops* avx2_ops();  // nullptr when the CPU lacks AVX2

// Best available implementation; honors TOMOCAL_KERNEL=scalar|avx2.
const Ops& ops();

}  // namespace tomocal::kernels
