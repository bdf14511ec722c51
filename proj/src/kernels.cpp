#include "tomocal/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace tomocal::kernels {

const Ops& ops() {
    static const Ops* selected = [] {
        const char* force = std::getenv("TOMOCAL_KERNEL");
        if (force && std::strcmp(force, "scalar") == 0) return &scalar_ops();
        if (const Ops* avx2 = avx2_ops()) return avx2;
        return &scalar_ops();
    }();
    return *selected;
}

}  // namespace tomocal::kernels
