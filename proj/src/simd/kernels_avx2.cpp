// Compiled with -mavx2 -mfma; only called after a runtime CPU check.

#include <immintrin.h>

#include <algorithm>
#include <bit>
#include <limits>

#include "gw/simd/kernels.hpp"

namespace gw::simd::avx2 {

namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

inline double hmax(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_max_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_max_sd(lo, sh));
}

}  // namespace

double convolve_at(const double* a, const double* b, std::size_t lo, std::size_t hi,
                   std::size_t e) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = lo;
    // b is read backwards: lanes (e-i-3 .. e-i) reversed line up with a[i .. i+3].
    for (; i + 7 <= hi; i += 8) {
        __m256d va0 = _mm256_loadu_pd(a + i);
        __m256d vb0 = _mm256_permute4x64_pd(_mm256_loadu_pd(b + (e - i - 3)), 0x1B);
        __m256d va1 = _mm256_loadu_pd(a + i + 4);
        __m256d vb1 = _mm256_permute4x64_pd(_mm256_loadu_pd(b + (e - i - 7)), 0x1B);
        acc0 = _mm256_fmadd_pd(va0, vb0, acc0);
        acc1 = _mm256_fmadd_pd(va1, vb1, acc1);
    }
    for (; i + 3 <= hi; i += 4) {
        __m256d va = _mm256_loadu_pd(a + i);
        __m256d vb = _mm256_permute4x64_pd(_mm256_loadu_pd(b + (e - i - 3)), 0x1B);
        acc0 = _mm256_fmadd_pd(va, vb, acc0);
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i <= hi; ++i) acc += a[i] * b[e - i];
    return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

std::uint64_t popcount_sum(const std::uint64_t* words, std::size_t n) {
    // Nibble lookup popcount (Mula), lane sums via SAD against zero.
    const __m256i lookup = _mm256_setr_epi8(0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4, 0, 1,
                                            1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4);
    const __m256i low_mask = _mm256_set1_epi8(0x0f);
    __m256i acc = _mm256_setzero_si256();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(words + i));
        __m256i lo = _mm256_and_si256(v, low_mask);
        __m256i hi = _mm256_and_si256(_mm256_srli_epi16(v, 4), low_mask);
        __m256i cnt = _mm256_add_epi8(_mm256_shuffle_epi8(lookup, lo),
                                      _mm256_shuffle_epi8(lookup, hi));
        acc = _mm256_add_epi64(acc, _mm256_sad_epu8(cnt, _mm256_setzero_si256()));
    }
    alignas(32) std::uint64_t lanes[4];
    _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), acc);
    std::uint64_t total = lanes[0] + lanes[1] + lanes[2] + lanes[3];
    for (; i < n; ++i) total += static_cast<std::uint64_t>(std::popcount(words[i]));
    return total;
}

std::int64_t window_max_i64(const std::int64_t* prefix, std::size_t n_starts, std::size_t width) {
    std::int64_t best = std::numeric_limits<std::int64_t>::min();
    std::size_t k = 0;
    if (n_starts >= 4) {
        __m256i vbest = _mm256_set1_epi64x(best);
        for (; k + 4 <= n_starts; k += 4) {
            __m256i hi = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(prefix + k + width));
            __m256i lo = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(prefix + k));
            __m256i d = _mm256_sub_epi64(hi, lo);
            __m256i gt = _mm256_cmpgt_epi64(d, vbest);
            vbest = _mm256_blendv_epi8(vbest, d, gt);
        }
        alignas(32) std::int64_t lanes[4];
        _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), vbest);
        best = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
    }
    for (; k < n_starts; ++k) best = std::max(best, prefix[k + width] - prefix[k]);
    return best;
}

double window_max_f64(const double* prefix, std::size_t n_starts, std::size_t width) {
    double best = -std::numeric_limits<double>::infinity();
    std::size_t k = 0;
    if (n_starts >= 4) {
        __m256d vbest = _mm256_set1_pd(best);
        for (; k + 4 <= n_starts; k += 4) {
            __m256d d = _mm256_sub_pd(_mm256_loadu_pd(prefix + k + width),
                                      _mm256_loadu_pd(prefix + k));
            vbest = _mm256_max_pd(vbest, d);
        }
        best = hmax(vbest);
    }
    for (; k < n_starts; ++k) best = std::max(best, prefix[k + width] - prefix[k]);
    return best;
}

}  // namespace gw::simd::avx2
