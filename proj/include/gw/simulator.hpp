#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "gw/estimator.hpp"
#include "gw/offspring_law.hpp"
#include "gw/rng.hpp"

namespace gw {

/// Generation sizes Z_0..Z_m of one population path.
///
/// extinct_at is the first generation with Z = 0 when that happened inside
/// the simulated range. censored is set when the total-progeny budget (or the
/// population ceiling) was hit while the population was alive; such a path
/// stops early and its remaining sizes are unknown.
struct Trajectory {
    std::vector<std::uint64_t> sizes;
    std::optional<std::size_t> extinct_at;
    bool censored = false;
};

/// Z' = sum of z independent offspring counts, saturating at kMaxOffspring.
///
/// Binary laws use 2 * popcount of z random bits; the geometric law counts the
/// zero bits before the z-th one bit (a negative binomial). Both are exact.
std::uint64_t next_generation(const OffspringLaw& law, std::uint64_t z, RngStream& rng);

/// Simulates Z_0 = z0, ..., Z_m, stopping after extinction (trailing zeros are
/// filled in) or once the running total exceeds `cap`.
Trajectory simulate_generations(const OffspringLaw& law, std::size_t m, std::uint64_t z0,
                                RngStream& rng,
                                std::uint64_t cap = std::numeric_limits<std::uint64_t>::max());

/// S_k(j) = Z_k + ... + Z_{k+j-1} for k = 0..len-j, where len = sizes.size().
std::vector<std::uint64_t> window_sums(const Trajectory& traj, std::size_t j);

/// max_k S_k(j). Throws std::invalid_argument unless 1 <= j <= sizes.size().
std::uint64_t window_max(const Trajectory& traj, std::size_t j);

/// E M_m(j) over paths Z_0..Z_{m-1}.
EstimatorResult estimate_EM(const OffspringLaw& law, std::size_t m, std::size_t j,
                            std::uint64_t n_samples, const McConfig& config);

struct TailPair {
    EstimatorResult window;  // P(M(j) >= n)
    EstimatorResult total;   // P(S_0(inf) >= n), same paths
};

/// P(M(j) >= n) with M(j) = M_inf(j), together with P(S_0(inf) >= n).
///
/// Paths run until the event is decided, extinction, or gen_cap generations.
/// Undecided paths count as "no" in the estimate and censor_lo; censor_hi adds
/// Q(gen_cap) and the undecided fraction.
TailPair estimate_tail_pair(const OffspringLaw& law, std::size_t j, std::uint64_t n,
                            std::uint64_t n_samples, std::size_t gen_cap,
                            const McConfig& config);

EstimatorResult estimate_tail_M(const OffspringLaw& law, std::size_t j, std::uint64_t n,
                                std::uint64_t n_samples, std::size_t gen_cap,
                                const McConfig& config);

/// P(max_{0<=l<=m} Z_l >= k), the left side of the maximum bounds.
EstimatorResult estimate_generation_max_tail(const OffspringLaw& law, std::size_t m,
                                             std::uint64_t k, std::uint64_t n_samples,
                                             const McConfig& config);

struct GenerationMoments {
    EstimatorResult mean;             // E Z_n
    EstimatorResult survivor_mean;    // E{Z_n | Z_n > 0}
    EstimatorResult survival;         // P(Z_n > 0)
};

GenerationMoments estimate_generation_moments(const OffspringLaw& law, std::size_t n,
                                              std::uint64_t n_samples, const McConfig& config);

/// Rejection sampler for a path with Z_n > 0, simulated through generation
/// `horizon` (>= n). Throws std::runtime_error after retry_cap failed tries.
Trajectory simulate_conditioned(const OffspringLaw& law, std::size_t n, RngStream& rng,
                                std::uint64_t retry_cap = 1000000000,
                                std::size_t horizon = 0, std::uint64_t* attempts = nullptr);

/// Q(n) Z_n for n_survivors independent paths conditioned on Z_n > 0.
std::vector<double> conditioned_scaled_sizes(const OffspringLaw& law, std::size_t n,
                                             std::uint64_t n_survivors, const McConfig& config);

}  // namespace gw
