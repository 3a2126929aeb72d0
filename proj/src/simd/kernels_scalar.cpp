#include "gw/simd/kernels.hpp"

#include <algorithm>
#include <bit>
#include <limits>

namespace gw::simd::scalar {

double convolve_at(const double* a, const double* b, std::size_t lo, std::size_t hi,
                   std::size_t e) {
    double acc = 0.0;
    for (std::size_t i = lo; i <= hi; ++i) acc += a[i] * b[e - i];
    return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

std::uint64_t popcount_sum(const std::uint64_t* words, std::size_t n) {
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < n; ++i) total += static_cast<std::uint64_t>(std::popcount(words[i]));
    return total;
}

std::int64_t window_max_i64(const std::int64_t* prefix, std::size_t n_starts, std::size_t width) {
    std::int64_t best = std::numeric_limits<std::int64_t>::min();
    for (std::size_t k = 0; k < n_starts; ++k) best = std::max(best, prefix[k + width] - prefix[k]);
    return best;
}

double window_max_f64(const double* prefix, std::size_t n_starts, std::size_t width) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n_starts; ++k) best = std::max(best, prefix[k + width] - prefix[k]);
    return best;
}

}  // namespace gw::simd::scalar
