#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gw/estimator.hpp"
#include "gw/offspring_law.hpp"

namespace gw {

/// Right side of the tail estimate for P(M_{m+1} >= k), M_{m+1} being the
/// largest of Z_0..Z_m:
///   (y0 + 1/R) [(1 + 1/(1/y0 + (e^2 + e^{y0 R}) m B_R / 2))^k - 1]^{-1}
///     + m P(xi > R).
/// The power is evaluated as expm1(k log1p(.)) and e^{y0 R} in log space.
double vah1_rhs(const OffspringLaw& law, std::uint64_t m, std::uint64_t k, double y0,
                std::uint64_t R);

/// The same expression evaluated literally with pow; overflows for large
/// y0 R. Kept as an independent cross-check.
double vah1_rhs_direct(const OffspringLaw& law, std::uint64_t m, std::uint64_t k, double y0,
                       std::uint64_t R);

/// (m B_inf + 1) / k^2 from Doob's inequality. Throws std::invalid_argument
/// when E xi(xi - 1) is infinite.
double doob_rhs(const OffspringLaw& law, std::uint64_t m, std::uint64_t k);

struct Vah1Parameters {
    double y0;
    std::uint64_t R;
};

/// y0 = (2/k) log x - (3/k) log log x with x = k / (m B_k), and R = k/2.
/// Empty, with `reason` set, when x <= e, y0 <= 0 or R < 2.
std::optional<Vah1Parameters> default_vah1_parameters(const OffspringLaw& law, std::uint64_t m,
                                                      std::uint64_t k, std::string* reason = nullptr);

enum class Verdict { holds, violated_beyond_3se, skipped };

std::string to_string(Verdict v);

struct BoundReport {
    std::string bound_name;
    std::string law;
    std::uint64_t m = 0;
    std::uint64_t k = 0;
    double y0 = 0.0;
    std::uint64_t R = 0;
    double rhs_value = 0.0;
    EstimatorResult mc_lhs;
    Verdict verdict = Verdict::skipped;
    std::string reason;
};

/// Estimates P(max_{l<=m} Z_l >= k) and compares it with the named bound
/// ("doob" or "vah1"). The bound holds iff censor_hi <= rhs + 3 SE.
BoundReport check_bound(const std::string& bound_name, const OffspringLaw& law, std::uint64_t m,
                        std::uint64_t k, std::uint64_t n_samples, const McConfig& config);

/// The shipped grid m in {1, 4, 16}, k in {4, 8, 16} for both bounds.
std::vector<BoundReport> check_bound_grid(const OffspringLaw& law, std::uint64_t n_samples,
                                          const McConfig& config);

struct TruncatedMomentCheck {
    std::uint64_t R;
    double lhs;  // B_R
    double rhs;  // 2 sum_{1<=j<=R} j P(xi > j)
    bool holds;
};

/// B_R <= 2 sum_{j=1}^{R} j P(xi > j) for R = 1..R_max.
std::vector<TruncatedMomentCheck> truncated_moment_check(const OffspringLaw& law, std::uint64_t R_max);

struct MaxScalingPoint {
    std::uint64_t k;
    std::uint64_t m;
    EstimatorResult probability;
    double ratio;  // P(M_{m+1} >= k) k^2 / (m B_k)
};

/// Scaling diagnostic: P(M_{m+1} >= k) k^2 / (m B_k) for k = 64, 128, ...,
/// k_max and m = k/16.
std::vector<MaxScalingPoint> max_scaling_diagnostic(const OffspringLaw& law, std::uint64_t k_max,
                                           std::uint64_t n_samples, const McConfig& config);

}  // namespace gw
