#include "tomocal/kernels.hpp"

namespace tomocal::kernels {

namespace {

void dot_batch_scalar(const double* rho, const double* eff, std::size_t n, double* out) {
    for (std::size_t i = 0; i < n; ++i) {
        const double* e = eff + 4 * i;
        out[i] = rho[0] * e[0] + rho[1] * e[1] + rho[2] * e[2] + rho[3] * e[3];
    }
}

void axpy_batch_scalar(const double* eff, const double* w, std::size_t n, double* acc) {
    for (std::size_t i = 0; i < n; ++i) {
        const double* e = eff + 4 * i;
        acc[0] += w[i] * e[0];
        acc[1] += w[i] * e[1];
        acc[2] += w[i] * e[2];
        acc[3] += w[i] * e[3];
    }
}

}  // namespace

const Ops& scalar_ops() {
    static const Ops ops{dot_batch_scalar, axpy_batch_scalar, "scalar"};
    return ops;
}

}  // namespace tomocal::kernels
