#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "gw/rng.hpp"

namespace gw {

inline constexpr std::uint64_t kDefaultSeed = 271828;

/// Seeding and parallelism for Monte Carlo estimators.
///
/// Work is split into fixed chunks of `chunk_size` samples; chunk c draws from
/// RngStream(seed, stream_base + c). Workers pull chunks in any order and the
/// per-chunk results are merged in chunk order, so the output depends on the
/// seed and chunk size but not on the number of workers.
struct McConfig {
    std::uint64_t seed = kDefaultSeed;
    std::uint64_t stream_base = 0;
    unsigned workers = 1;
    std::uint64_t chunk_size = 1024;
};

/// Mean and standard error with an optional censoring interval.
struct EstimatorResult {
    double estimate = 0.0;
    double std_error = 0.0;
    std::uint64_t n_samples = 0;
    double censor_lo = 0.0;
    double censor_hi = 0.0;
    std::uint64_t n_censored = 0;
    std::uint64_t seed = 0;
    std::uint64_t stream_base = 0;
};

/// Count, mean and centered second moment; merges exactly as in Chan et al.
struct MomentAccumulator {
    std::uint64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++n;
        const double delta = x - mean;
        mean += delta / static_cast<double>(n);
        m2 += delta * (x - mean);
    }

    void merge(const MomentAccumulator& other) {
        if (other.n == 0) return;
        if (n == 0) {
            *this = other;
            return;
        }
        const double na = static_cast<double>(n);
        const double nb = static_cast<double>(other.n);
        const double delta = other.mean - mean;
        const double total = na + nb;
        mean += delta * nb / total;
        m2 += other.m2 + delta * delta * na * nb / total;
        n += other.n;
    }

    double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
    double std_error() const {
        return n > 0 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0;
    }
};

/// Sample mean result with no censoring.
EstimatorResult mean_result(const MomentAccumulator& acc, const McConfig& config);

/// Runs body(rng, first_sample, count) for every chunk and merges the returned
/// accumulators in chunk order with merge(into, from).
template <class Acc, class Body, class Merge>
Acc chunked_map_reduce(std::uint64_t n_samples, const McConfig& config, Body&& body,
                       Merge&& merge) {
    const std::uint64_t chunk = std::max<std::uint64_t>(1, config.chunk_size);
    const std::uint64_t n_chunks = (n_samples + chunk - 1) / chunk;
    std::vector<std::optional<Acc>> partial(n_chunks);
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&]() {
        for (;;) {
            const std::uint64_t c = next.fetch_add(1);
            if (c >= n_chunks) return;
            try {
                RngStream rng(config.seed, config.stream_base + c);
                const std::uint64_t first = c * chunk;
                const std::uint64_t count = std::min(chunk, n_samples - first);
                partial[c].emplace(body(rng, first, count));
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(n_chunks);
                return;
            }
        }
    };

    const unsigned workers =
        static_cast<unsigned>(std::max<std::uint64_t>(1, std::min<std::uint64_t>(config.workers, n_chunks)));
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    Acc total{};
    for (auto& p : partial)
        if (p) merge(total, *p);
    return total;
}

/// Kolmogorov-Smirnov distance between the empirical law of `sample` and a
/// continuous cdf.
double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf);

/// Worker count from the GW_WINDOW_WORKERS environment variable, or 1.
unsigned workers_from_env();

}  // namespace gw
