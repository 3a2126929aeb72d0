#pragma once

// Data-parallel inner loops used by the exact engine and the simulator.
//
// Every kernel has a scalar reference implementation in gw::simd::scalar and,
// when built for x86-64, an AVX2 implementation in gw::simd::avx2. Callers go
// through the dispatching free functions below, which pick a variant once at
// startup. Setting GW_WINDOW_SIMD=scalar in the environment pins the scalar
// path.
//
// Integer kernels (popcount, window maxima) are bit-identical across
// variants. Floating-point reductions differ only by summation order.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace gw::simd {

enum class Isa { scalar, avx2 };

struct KernelTable {
    // sum_{i=lo}^{hi} a[i] * b[e - i]; requires hi <= e and e - lo < b.size().
    double (*convolve_at)(const double* a, const double* b, std::size_t lo, std::size_t hi,
                          std::size_t e);
    // y[i] += alpha * x[i] for i < n.
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    // sum of popcounts of words[0..n).
    std::uint64_t (*popcount_sum)(const std::uint64_t* words, std::size_t n);
    // max_{k < n_starts} prefix[k + width] - prefix[k].
    std::int64_t (*window_max_i64)(const std::int64_t* prefix, std::size_t n_starts,
                                   std::size_t width);
    double (*window_max_f64)(const double* prefix, std::size_t n_starts, std::size_t width);
};

namespace scalar {
double convolve_at(const double* a, const double* b, std::size_t lo, std::size_t hi,
                   std::size_t e);
void axpy(double alpha, const double* x, double* y, std::size_t n);
std::uint64_t popcount_sum(const std::uint64_t* words, std::size_t n);
std::int64_t window_max_i64(const std::int64_t* prefix, std::size_t n_starts, std::size_t width);
double window_max_f64(const double* prefix, std::size_t n_starts, std::size_t width);
}  // namespace scalar

#if defined(GW_WINDOW_HAVE_AVX2)
namespace avx2 {
double convolve_at(const double* a, const double* b, std::size_t lo, std::size_t hi,
                   std::size_t e);
void axpy(double alpha, const double* x, double* y, std::size_t n);
std::uint64_t popcount_sum(const std::uint64_t* words, std::size_t n);
std::int64_t window_max_i64(const std::int64_t* prefix, std::size_t n_starts, std::size_t width);
double window_max_f64(const double* prefix, std::size_t n_starts, std::size_t width);
}  // namespace avx2
#endif

/// True when the AVX2 variant was compiled in and the running CPU supports it.
bool avx2_available();

/// Variant table for an explicit ISA. Throws std::invalid_argument when the
/// requested ISA is unavailable.
const KernelTable& table(Isa isa);

/// The table selected at startup.
const KernelTable& active();
Isa active_isa();
std::string_view isa_name(Isa isa);

inline double convolve_at(std::span<const double> a, std::span<const double> b, std::size_t lo,
                          std::size_t hi, std::size_t e) {
    if (hi < lo) return 0.0;
    return active().convolve_at(a.data(), b.data(), lo, hi, e);
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    active().axpy(alpha, x.data(), y.data(), x.size() < y.size() ? x.size() : y.size());
}

inline std::uint64_t popcount_sum(std::span<const std::uint64_t> words) {
    return active().popcount_sum(words.data(), words.size());
}

inline std::int64_t window_max(std::span<const std::int64_t> prefix, std::size_t width) {
    return active().window_max_i64(prefix.data(), prefix.size() - width, width);
}

inline double window_max(std::span<const double> prefix, std::size_t width) {
    return active().window_max_f64(prefix.data(), prefix.size() - width, width);
}

}  // namespace gw::simd
