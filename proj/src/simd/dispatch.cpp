#include <cstdlib>
#include <stdexcept>
#include <string>

#include "gw/simd/kernels.hpp"

namespace gw::simd {

namespace {

constexpr KernelTable kScalar{
    scalar::convolve_at, scalar::axpy, scalar::popcount_sum, scalar::window_max_i64,
    scalar::window_max_f64,
};

#if defined(GW_WINDOW_HAVE_AVX2)
constexpr KernelTable kAvx2{
    avx2::convolve_at, avx2::axpy, avx2::popcount_sum, avx2::window_max_i64,
    avx2::window_max_f64,
};
#endif

Isa select_isa() {
    if (const char* forced = std::getenv("GW_WINDOW_SIMD")) {
        if (std::string(forced) == "scalar") return Isa::scalar;
    }
    return avx2_available() ? Isa::avx2 : Isa::scalar;
}

}  // namespace

bool avx2_available() {
#if defined(GW_WINDOW_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    return ok;
#else
    return false;
#endif
}

const KernelTable& table(Isa isa) {
    if (isa == Isa::scalar) return kScalar;
#if defined(GW_WINDOW_HAVE_AVX2)
    if (avx2_available()) return kAvx2;
#endif
    throw std::invalid_argument("AVX2 kernels are not available on this build/CPU");
}

Isa active_isa() {
    static const Isa isa = select_isa();
    return isa;
}

const KernelTable& active() {
    static const KernelTable& t = table(active_isa());
    return t;
}

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

}  // namespace gw::simd
