#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "gw/estimator.hpp"
#include "gw/offspring_law.hpp"
#include "gw/rng.hpp"

namespace gw {

enum class PathSource { gw_approx, csbp_exact_alpha1 };

/// Path sampled on a uniform grid t_k = k * spacing, k = 0..values.size()-1,
/// read as a step function: value k holds on [t_k, t_{k+1}). The grid covers
/// [0, horizon) with horizon = values.size() * spacing.
struct LimitPathGrid {
    double spacing = 0.0;
    std::vector<double> values;
    PathSource source = PathSource::gw_approx;
    double resolution = 0.0;  // n_scale for gw_approx, dt for csbp

    double horizon() const { return spacing * static_cast<double>(values.size()); }
    std::vector<double> times() const;
};

/// Conditioned path Q(n) Z_{nt}, t in [0, T), from a GW path with Z_n > 0 for
/// n = n_scale. q_n must be Q(n_scale).
LimitPathGrid gw_limit_path(const OffspringLaw& law, double T, std::size_t n_scale, double q_n,
                            RngStream& rng);

/// V*(T): the largest integral of the step path over a window of unit length
/// starting at a grid point in [0, T-1]. Uses the first round(T/spacing)
/// cells; T defaults to the full horizon. Throws std::invalid_argument for
/// T < 1 or T beyond the horizon.
double vstar_of_path(const LimitPathGrid& path, double T = -1.0);

/// Integral of the step path over [0, T).
double integral_of_path(const LimitPathGrid& path, double T = -1.0);

/// E V*(T) for every T in Ts (each >= 1), computed on prefixes of the same
/// conditioned paths, so estimates are coupled across T.
std::vector<EstimatorResult> estimate_EVstar(const OffspringLaw& law, const std::vector<double>& Ts,
                                             std::size_t n_scale, std::uint64_t n_paths,
                                             const McConfig& config);

/// Mean of the path value at t = 1, i.e. Q(n) Z_n given Z_n > 0.
EstimatorResult estimate_path_value_at_one(const OffspringLaw& law, std::size_t n_scale,
                                           std::uint64_t n_paths, const McConfig& config);

/// phi(eta) = alpha/(2 alpha + 1) + E V*(1/eta).
EstimatorResult estimate_phi(const OffspringLaw& law, double eta, std::size_t n_scale,
                             std::uint64_t n_paths, const McConfig& config);

struct PsiEstimate {
    double y = 0.0;
    double term1 = 0.0;  // P(V*(T_cutoff) >= 1/y)
    double term2 = 0.0;  // (alpha y)^{1/(1+alpha)} / Gamma(alpha/(1+alpha))
    double term3 = 0.0;  // P(integral over [0, T_cutoff) >= 1/y)
    EstimatorResult result;  // estimate = term1 + term2 - term3
    double cutoff_bias_bound = 0.0;
};

/// psi(y) for every y in ys on one set of conditioned paths cut at T_cutoff.
/// The standard error comes from the paired difference of the two indicators.
/// cutoff_bias_bound = c T_cutoff^{-1/alpha} with
/// c = max_{1 <= T <= T_cutoff} Q(T n) / Q(n) * T^{1/alpha}.
std::vector<PsiEstimate> estimate_psi(const OffspringLaw& law, const std::vector<double>& ys,
                                      double T_cutoff, std::size_t n_scale, std::uint64_t n_paths,
                                      const McConfig& config);

/// Exact alpha = 1 transition: N ~ Poisson(x/t), then the sum of N
/// exponentials with mean t.
double csbp_alpha1_transition(double x, double t, RngStream& rng);

/// X* on [0, T) for alpha = 1: the surviving process X+ on [0, 1] by a Doob
/// h-transform with h(t, y) = 1 - exp(-y/(1-t)), then exact transitions.
LimitPathGrid csbp_alpha1_path(double T, double dt, RngStream& rng);

/// E V*(T) from exact alpha = 1 paths, coupled across Ts. Requires dt <= 0.01.
std::vector<EstimatorResult> csbp_alpha1_vstar(const std::vector<double>& Ts, double dt,
                                               std::uint64_t n_paths, const McConfig& config);

}  // namespace gw
