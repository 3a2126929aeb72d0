#include "gw/simulator.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <string>

#include "gw/exact_engine.hpp"
#include "gw/simd/kernels.hpp"

namespace gw {

namespace {

constexpr std::size_t kBlockWords = 256;

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
    const std::uint64_t s = a + b;
    return (s < a || s > kMaxOffspring) ? kMaxOffspring : s;
}

std::uint64_t binary_offspring(std::uint64_t z, RngStream& rng) {
    thread_local std::vector<std::uint64_t> buffer(kBlockWords);
    std::uint64_t ones = 0;
    std::uint64_t full = z / 64;
    while (full > 0) {
        const std::size_t b = static_cast<std::size_t>(std::min<std::uint64_t>(full, kBlockWords));
        for (std::size_t i = 0; i < b; ++i) buffer[i] = rng();
        ones += simd::popcount_sum(std::span<const std::uint64_t>(buffer.data(), b));
        full -= b;
    }
    const unsigned rem = static_cast<unsigned>(z % 64);
    if (rem) ones += static_cast<std::uint64_t>(std::popcount(rng() & ((std::uint64_t{1} << rem) - 1)));
    return 2 * ones;
}

// Failures before the z-th success in fair coin flips, one flip per bit.
std::uint64_t geometric_offspring(std::uint64_t z, RngStream& rng) {
    thread_local std::vector<std::uint64_t> buffer(64);
    std::uint64_t need = z;
    std::uint64_t zeros = 0;
    while (need > 64 * 64) {
        for (auto& w : buffer) w = rng();
        const std::uint64_t c = simd::popcount_sum(buffer);
        need -= c;
        zeros += 64 * 64 - c;
    }
    while (need > 0) {
        std::uint64_t w = rng();
        const std::uint64_t c = static_cast<std::uint64_t>(std::popcount(w));
        if (c < need) {
            need -= c;
            zeros += 64 - c;
            continue;
        }
        for (std::uint64_t i = 1; i < need; ++i) w &= w - 1;
        const std::uint64_t pos = static_cast<std::uint64_t>(std::countr_zero(w));
        zeros += pos + 1 - need;
        need = 0;
    }
    return std::min(zeros, kMaxOffspring);
}

}  // namespace

std::uint64_t next_generation(const OffspringLaw& law, std::uint64_t z, RngStream& rng) {
    if (z == 0) return 0;
    if (law.is_binary()) return binary_offspring(z, rng);
    if (law.family() == Family::geometric) return geometric_offspring(z, rng);
    std::uint64_t total = 0;
    for (std::uint64_t i = 0; i < z; ++i) {
        total = saturating_add(total, law.sample(rng));
        if (total == kMaxOffspring) break;
    }
    return total;
}

Trajectory simulate_generations(const OffspringLaw& law, std::size_t m, std::uint64_t z0,
                                RngStream& rng, std::uint64_t cap) {
    if (z0 < 1) throw std::invalid_argument("simulate_generations: z0 must be >= 1");
    Trajectory traj;
    traj.sizes.assign(m + 1, 0);
    traj.sizes[0] = z0;
    std::uint64_t total = z0;
    if (total > cap) {
        traj.censored = true;
        traj.sizes.resize(1);
        return traj;
    }
    for (std::size_t k = 1; k <= m; ++k) {
        const std::uint64_t z = next_generation(law, traj.sizes[k - 1], rng);
        traj.sizes[k] = z;
        if (z == 0) {
            traj.extinct_at = k;
            break;
        }
        total = saturating_add(total, z);
        if (total > cap || z >= kMaxOffspring) {
            traj.censored = true;
            traj.sizes.resize(k + 1);
            break;
        }
    }
    return traj;
}

std::vector<std::uint64_t> window_sums(const Trajectory& traj, std::size_t j) {
    const std::size_t len = traj.sizes.size();
    if (j < 1 || j > len) throw std::invalid_argument("window_sums: need 1 <= j <= length");
    std::vector<std::uint64_t> prefix(len + 1, 0);
    for (std::size_t i = 0; i < len; ++i) prefix[i + 1] = prefix[i] + traj.sizes[i];
    std::vector<std::uint64_t> sums(len - j + 1);
    for (std::size_t k = 0; k < sums.size(); ++k) sums[k] = prefix[k + j] - prefix[k];
    return sums;
}

std::uint64_t window_max(const Trajectory& traj, std::size_t j) {
    const std::size_t len = traj.sizes.size();
    if (j < 1 || j > len) throw std::invalid_argument("window_max: need 1 <= j <= length");
    std::vector<std::int64_t> prefix(len + 1, 0);
    for (std::size_t i = 0; i < len; ++i)
        prefix[i + 1] = prefix[i] + static_cast<std::int64_t>(traj.sizes[i]);
    return static_cast<std::uint64_t>(simd::window_max(prefix, j));
}

EstimatorResult estimate_EM(const OffspringLaw& law, std::size_t m, std::size_t j,
                            std::uint64_t n_samples, const McConfig& config) {
    if (j < 1 || j > m) throw std::invalid_argument("estimate_EM: need 1 <= j <= m");
    auto body = [&](RngStream& rng, std::uint64_t, std::uint64_t count) {
        MomentAccumulator acc;
        std::vector<std::int64_t> prefix(m + 1, 0);
        for (std::uint64_t s = 0; s < count; ++s) {
            // prefix[i] = Z_0 + ... + Z_{i-1}; generations 0..m-1.
            std::uint64_t z = 1;
            prefix[1] = 1;
            std::size_t last = 1;  // prefix filled through this index
            while (last < m && z > 0) {
                z = next_generation(law, z, rng);
                const std::int64_t add = static_cast<std::int64_t>(std::min(z, kMaxOffspring));
                prefix[last + 1] = prefix[last] + add;
                ++last;
            }
            // After extinction at generation e = last - 1, any window starting
            // beyond e sums to zero.
            const std::size_t e = last - 1;
            const std::size_t n_starts = std::min(m - j, e) + 1;
            const std::size_t needed = n_starts - 1 + j;
            for (std::size_t i = last + 1; i <= needed; ++i) prefix[i] = prefix[last];
            const std::int64_t best =
                simd::window_max(std::span<const std::int64_t>(prefix.data(), needed + 1), j);
            acc.add(static_cast<double>(best));
        }
        return acc;
    };
    const auto acc = chunked_map_reduce<MomentAccumulator>(
        n_samples, config, body, [](MomentAccumulator& a, const MomentAccumulator& b) { a.merge(b); });
    return mean_result(acc, config);
}

namespace {

struct TailCounts {
    std::uint64_t n = 0;
    std::uint64_t window_yes = 0;
    std::uint64_t window_undecided = 0;
    std::uint64_t total_yes = 0;
    std::uint64_t total_undecided = 0;
    void merge(const TailCounts& o) {
        n += o.n;
        window_yes += o.window_yes;
        window_undecided += o.window_undecided;
        total_yes += o.total_yes;
        total_undecided += o.total_undecided;
    }
};

EstimatorResult proportion_result(std::uint64_t yes, std::uint64_t undecided, std::uint64_t n,
                                  double extra_upper, const McConfig& config) {
    EstimatorResult r;
    const double nd = static_cast<double>(n);
    const double p = n ? static_cast<double>(yes) / nd : 0.0;
    r.estimate = p;
    r.std_error = n ? std::sqrt(p * (1.0 - p) / nd) : 0.0;
    r.n_samples = n;
    r.n_censored = undecided;
    r.censor_lo = p;
    r.censor_hi = std::min(1.0, p + extra_upper + (n ? static_cast<double>(undecided) / nd : 0.0));
    r.seed = config.seed;
    r.stream_base = config.stream_base;
    return r;
}

}  // namespace

TailPair estimate_tail_pair(const OffspringLaw& law, std::size_t j, std::uint64_t n,
                            std::uint64_t n_samples, std::size_t gen_cap,
                            const McConfig& config) {
    if (j < 1 || n < 1) throw std::invalid_argument("estimate_tail_M: need j, n >= 1");
    auto body = [&](RngStream& rng, std::uint64_t, std::uint64_t count) {
        TailCounts counts;
        std::vector<std::uint64_t> ring(j, 0);
        for (std::uint64_t s = 0; s < count; ++s) {
            std::fill(ring.begin(), ring.end(), 0);
            std::uint64_t z = 1;
            ring[0] = 1;
            std::uint64_t window = 1;
            std::uint64_t total = 1;
            std::size_t k = 0;
            bool window_yes = window >= n;
            while (!window_yes && z > 0 && k < gen_cap) {
                ++k;
                z = next_generation(law, z, rng);
                const std::size_t slot = k % j;
                window = window - ring[slot] + z;
                ring[slot] = z;
                total = saturating_add(total, z);
                window_yes = window >= n;
            }
            const bool decided = window_yes || z == 0;
            ++counts.n;
            if (window_yes) ++counts.window_yes;
            if (!decided) ++counts.window_undecided;
            if (total >= n)
                ++counts.total_yes;
            else if (!decided)
                ++counts.total_undecided;
        }
        return counts;
    };
    const auto counts = chunked_map_reduce<TailCounts>(
        n_samples, config, body, [](TailCounts& a, const TailCounts& b) { a.merge(b); });
    const double q_cap = iterate_extinction(law, gen_cap).Q_values[gen_cap];
    return {proportion_result(counts.window_yes, counts.window_undecided, counts.n, q_cap, config),
            proportion_result(counts.total_yes, counts.total_undecided, counts.n, q_cap, config)};
}

EstimatorResult estimate_tail_M(const OffspringLaw& law, std::size_t j, std::uint64_t n,
                                std::uint64_t n_samples, std::size_t gen_cap,
                                const McConfig& config) {
    return estimate_tail_pair(law, j, n, n_samples, gen_cap, config).window;
}

EstimatorResult estimate_generation_max_tail(const OffspringLaw& law, std::size_t m,
                                             std::uint64_t k, std::uint64_t n_samples,
                                             const McConfig& config) {
    auto body = [&](RngStream& rng, std::uint64_t, std::uint64_t count) {
        TailCounts counts;
        for (std::uint64_t s = 0; s < count; ++s) {
            std::uint64_t z = 1;
            bool yes = z >= k;
            for (std::size_t l = 1; l <= m && !yes && z > 0; ++l) {
                z = next_generation(law, z, rng);
                yes = z >= k;
            }
            ++counts.n;
            if (yes) ++counts.window_yes;
        }
        return counts;
    };
    const auto counts = chunked_map_reduce<TailCounts>(
        n_samples, config, body, [](TailCounts& a, const TailCounts& b) { a.merge(b); });
    return proportion_result(counts.window_yes, 0, counts.n, 0.0, config);
}

GenerationMoments estimate_generation_moments(const OffspringLaw& law, std::size_t n,
                                              std::uint64_t n_samples, const McConfig& config) {
    struct Acc {
        MomentAccumulator all, survivors, alive;
    };
    auto body = [&](RngStream& rng, std::uint64_t, std::uint64_t count) {
        Acc acc;
        for (std::uint64_t s = 0; s < count; ++s) {
            std::uint64_t z = 1;
            for (std::size_t k = 1; k <= n && z > 0; ++k) z = next_generation(law, z, rng);
            const double zd = static_cast<double>(z);
            acc.all.add(zd);
            acc.alive.add(z > 0 ? 1.0 : 0.0);
            if (z > 0) acc.survivors.add(zd);
        }
        return acc;
    };
    const auto acc = chunked_map_reduce<Acc>(n_samples, config, body, [](Acc& a, const Acc& b) {
        a.all.merge(b.all);
        a.survivors.merge(b.survivors);
        a.alive.merge(b.alive);
    });
    return {mean_result(acc.all, config), mean_result(acc.survivors, config),
            mean_result(acc.alive, config)};
}

Trajectory simulate_conditioned(const OffspringLaw& law, std::size_t n, RngStream& rng,
                                std::uint64_t retry_cap, std::size_t horizon,
                                std::uint64_t* attempts) {
    if (n < 1) throw std::invalid_argument("simulate_conditioned: n must be >= 1");
    horizon = std::max(horizon, n);
    Trajectory traj;
    traj.sizes.reserve(horizon + 1);
    for (std::uint64_t attempt = 1; attempt <= retry_cap; ++attempt) {
        traj.sizes.clear();
        std::uint64_t z = 1;
        traj.sizes.push_back(z);
        for (std::size_t k = 1; k <= n && z > 0; ++k) {
            z = next_generation(law, z, rng);
            traj.sizes.push_back(z);
        }
        if (z == 0) continue;
        if (attempts) *attempts = attempt;
        for (std::size_t k = n + 1; k <= horizon; ++k) {
            z = next_generation(law, z, rng);
            traj.sizes.push_back(z);
            if (z == 0) {
                traj.extinct_at = k;
                break;
            }
            if (z >= kMaxOffspring) {
                traj.censored = true;
                return traj;
            }
        }
        traj.sizes.resize(horizon + 1, 0);
        return traj;
    }
    throw std::runtime_error("simulate_conditioned: no survivor to generation " +
                             std::to_string(n) + " within " + std::to_string(retry_cap) +
                             " attempts");
}

std::vector<double> conditioned_scaled_sizes(const OffspringLaw& law, std::size_t n,
                                             std::uint64_t n_survivors, const McConfig& config) {
    const double qn = iterate_extinction(law, n).Q_values[n];
    auto body = [&](RngStream& rng, std::uint64_t, std::uint64_t count) {
        std::vector<double> out;
        out.reserve(count);
        for (std::uint64_t s = 0; s < count; ++s) {
            const Trajectory t = simulate_conditioned(law, n, rng);
            out.push_back(qn * static_cast<double>(t.sizes[n]));
        }
        return out;
    };
    return chunked_map_reduce<std::vector<double>>(
        n_survivors, config, body,
        [](std::vector<double>& a, const std::vector<double>& b) { a.insert(a.end(), b.begin(), b.end()); });
}

}  // namespace gw
