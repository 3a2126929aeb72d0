#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "gw/offspring_law.hpp"
#include "gw/series.hpp"

namespace gw {

/// Extinction iterates and the sequences derived from them, indexed by
/// generation k = 0..n.
///
/// f0_values[k] = f_k(0) = P(Z_k = 0), Q_values[k] = P(Z_k > 0),
/// d_values[k] = prod_{i=1}^{k-1} f'(f_i(0)) (d_0 = d_1 = 1),
/// a_values[k] = E{S_0(k); Z_k = 0} (a_0 = 0).
struct IterateTable {
    std::vector<double> f0_values;
    std::vector<double> Q_values;
    std::vector<double> d_values;
    std::vector<double> a_values;
};

/// Q(k) through Q(k+1) = 1 - f(1 - Q(k)), which never subtracts nearly equal
/// numbers. Fills f0_values and Q_values only.
IterateTable iterate_extinction(const OffspringLaw& law, std::size_t n);

/// d_1..d_n returned at indices 1..n (index 0 holds 1).
std::vector<double> d_product(const OffspringLaw& law, std::size_t n);

/// a_1..a_j at indices 1..j (index 0 holds 0), via
/// a_j = f_j(0) + f'(f_{j-1}(0)) a_{j-1}.
std::vector<double> restricted_mean_a(const OffspringLaw& law, std::size_t j);

/// All four sequences up to n.
IterateTable full_iterate_table(const OffspringLaw& law, std::size_t n);

/// Law of the total progeny S_0(inf): coefficients of h = s f(h) up to n_max.
/// Every coefficient is exact; residual_mass = P(S_0(inf) > n_max).
TruncatedSeries total_progeny_pmf(const OffspringLaw& law, std::size_t n_max);

/// Largest n accepted by dwass_oracle.
inline constexpr std::size_t kDwassBudget = 10000;

/// P(S_0(inf) = n) = P(xi_1 + ... + xi_n = n - 1) / n by repeated squaring of
/// the pmf truncated at degree n - 1. Throws std::length_error past the budget.
double dwass_oracle(const OffspringLaw& law, std::size_t n);

/// dwass_oracle for every n = 1..n_max at once (index 0 holds 0), building
/// the n-fold convolutions incrementally.
std::vector<double> dwass_oracle_batch(const OffspringLaw& law, std::size_t n_max);

/// Binary law: P(S_0(inf) = n), zero for even n, else
/// C(n, (n-1)/2) 2^{-n} / n.
double binary_total_progeny_pmf(std::uint64_t n);
/// Binary law: P(S_0(inf) >= n) = C(2r, r) / 4^r with r = floor(n / 2).
double binary_total_progeny_tail(std::uint64_t n);

/// E{s^{S_0(j)}; Z_j = 0} truncated at degree_cap. Coefficient sum plus
/// residual_mass equals f_j(0).
TruncatedSeries bivariate_hj(const OffspringLaw& law, std::size_t j, std::size_t degree_cap);

/// Root q of alpha q^alpha L(q) = 1/n, i.e. alpha (f(1-q) - (1-q)) / q = 1/n.
/// Throws std::domain_error when 1/n >= alpha p_0, where no root lies in (0, 1).
double slack_Q_asymptote(const OffspringLaw& law, double n);

struct TailConstants {
    double term2_constant;  // (alpha y)^{1/(1+alpha)} / Gamma(alpha/(1+alpha))
    double cor22_constant;  // alpha^{1/(1+alpha)} / Gamma(alpha/(1+alpha))
};

TailConstants tail_constants(double alpha, double y);

struct WindowTailBudget {
    std::size_t max_generations = 100000;
    std::size_t max_states = 1000000;
    double prune_threshold = 1e-15;
};

struct ProbabilityInterval {
    double lo;
    double hi;
    std::size_t generations;  // generations enumerated
    std::size_t peak_states;
};

/// Encloses P(M(j) >= n) by exhaustive enumeration of generation sizes.
///
/// The state is the last max(1, j - 1) generation sizes. Transitions use
/// exact z-fold convolutions of the pmf truncated at n. Mass below the prune
/// threshold, and mass still undecided when the budget runs out, widen the
/// interval instead of being dropped.
ProbabilityInterval window_tail_bruteforce(const OffspringLaw& law, std::size_t j, std::size_t n,
                                           const WindowTailBudget& budget = {});

}  // namespace gw
