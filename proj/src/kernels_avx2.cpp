#include "tomocal/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define TOMOCAL_X86 1
#include <immintrin.h>
#else
#define TOMOCAL_X86 0
#endif

namespace tomocal::kernels {

#if TOMOCAL_X86

namespace {

__attribute__((target("avx2,fma"))) void dot_batch_avx2(const double* rho, const double* eff,
                                                        std::size_t n, double* out) {
    const __m256d r = _mm256_loadu_pd(rho);
    std::size_t i = 0;
    // two packed matrices per iteration, each one ymm lane-pair reduction
    for (; i + 2 <= n; i += 2) {
        const __m256d a = _mm256_mul_pd(r, _mm256_loadu_pd(eff + 4 * i));
        const __m256d b = _mm256_mul_pd(r, _mm256_loadu_pd(eff + 4 * i + 4));
        // horizontal sums: hadd interleaves a/b 128-bit halves
        const __m256d h = _mm256_hadd_pd(a, b);  // [a0+a1, b0+b1, a2+a3, b2+b3]
        const __m128d lo = _mm256_castpd256_pd128(h);
        const __m128d hi = _mm256_extractf128_pd(h, 1);
        const __m128d s = _mm_add_pd(lo, hi);  // [a_sum, b_sum]
        _mm_storeu_pd(out + i, s);
    }
    for (; i < n; ++i) {
        const __m256d a = _mm256_mul_pd(r, _mm256_loadu_pd(eff + 4 * i));
        const __m128d lo = _mm256_castpd256_pd128(a);
        const __m128d hi = _mm256_extractf128_pd(a, 1);
        __m128d s = _mm_add_pd(lo, hi);
        s = _mm_add_sd(s, _mm_unpackhi_pd(s, s));
        _mm_store_sd(out + i, s);
    }
}

__attribute__((target("avx2,fma"))) void axpy_batch_avx2(const double* eff, const double* w,
                                                         std::size_t n, double* acc) {
    __m256d a = _mm256_loadu_pd(acc);
    for (std::size_t i = 0; i < n; ++i) {
        const __m256d wi = _mm256_broadcast_sd(w + i);
        a = _mm256_fmadd_pd(wi, _mm256_loadu_pd(eff + 4 * i), a);
    }
    _mm256_storeu_pd(acc, a);
}

}  // namespace

const Ops* avx2_ops() {
    if (!__builtin_cpu_supports("avx2") || !__builtin_cpu_supports("fma")) return nullptr;
    static const Ops ops{dot_batch_avx2, axpy_batch_avx2, "avx2"};
    return &ops;
}

#else

const Ops* avx2_ops() { return nullptr; }

#endif

}  // namespace tomocal::kernels
