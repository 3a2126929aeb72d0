#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gw/rng.hpp"

namespace gw {

enum class Family { binary, geometric, stable, zipf, finite };

std::string to_string(Family family);

/// Largest offspring count a single draw can return. Heavy-tailed draws are
/// clamped here; the simulator treats such populations as censored.
inline constexpr std::uint64_t kMaxOffspring = std::uint64_t{1} << 62;

namespace detail {
struct LawData;
}

/// Critical offspring distribution of index 1 + alpha, i.e. with generating
/// function f(s) = s + (1 - s)^{1 + alpha} L(1 - s).
///
/// Four certified families are shipped:
///  - binary:    p_0 = p_2 = 1/2, alpha = 1, L = 1/2
///  - geometric: p_k = 2^{-(k+1)}, alpha = 1, L(x) = 1/(1 + x)
///  - stable:    f(s) = s + c (1 - s)^{1 + alpha} with 0 < c <= 1/(1 + alpha)
///  - zipf:      p_k = w k^{-(2 + alpha)} for k >= 2, (p_0, p_1) fixed by
///               normalization and criticality; L is only asymptotically
///               constant
///
/// plus `finite`, an arbitrary finite pmf with alpha = 1 that is constructed
/// without checks so that validate() can report defects.
///
/// Immutable after construction; copies share the precomputed tables and may
/// be used from any number of threads.
class OffspringLaw {
public:
    static OffspringLaw binary();
    static OffspringLaw geometric();
    /// Throws std::invalid_argument unless alpha in (0, 1] and
    /// c in (0, 1/(1 + alpha)].
    static OffspringLaw stable(double alpha, double c);
    /// weight defaults to its maximum 1/(zeta(1 + alpha) - 1), giving p_1 = 0.
    static OffspringLaw zipf(double alpha, std::optional<double> weight = std::nullopt);
    static OffspringLaw finite(std::vector<double> pmf);

    Family family() const;
    double alpha() const;
    /// Stable: c. Zipf: w. Otherwise 0.
    double parameter() const;
    std::string name() const;

    double pmf(std::uint64_t k) const;
    /// P(xi > k).
    double tail_prob(std::uint64_t k) const;

    /// f(s) for s in [0, 1]; throws std::domain_error outside.
    double pgf(double s) const;
    double pgf_derivative(double s) const;

    /// 1 - f(1 - q), evaluated without cancellation for small q.
    double complement(double q) const;
    /// 1 - f'(1 - x).
    double derivative_complement(double x) const;
    /// f(1 - x) - (1 - x) = x^{1 + alpha} L(x).
    double gap(double x) const;
    /// L(x) = gap(x) / x^{1 + alpha} for x in (0, 1]; throws at x = 0.
    double slowly_varying_L(double x) const;

    /// B_R = E{xi (xi - 1); xi <= R}.
    double truncated_variance(std::uint64_t R) const;
    /// E xi (xi - 1) when finite.
    std::optional<double> factorial_variance() const;

    /// Head mass plus analytic tail mass.
    double total_mass() const;
    /// Head mean plus analytic tail mean.
    double mean() const;

    /// Largest k with positive mass, if the support is finite.
    std::optional<std::uint64_t> support_max() const;
    /// Head probabilities p_0..p_K used by the alias table.
    std::span<const double> head() const;

    std::uint64_t sample(RngStream& rng) const;

    /// True for the binary law in any of its guises (binary, stable(1, 1/2),
    /// finite {1/2, 0, 1/2}); lets the simulator use a bit-parallel path.
    bool is_binary() const;

private:
    explicit OffspringLaw(std::shared_ptr<const detail::LawData> data);
    std::shared_ptr<const detail::LawData> data_;
};

struct LawCheck {
    enum class Status { pass, fail, asymptotic_only };
    std::string name;
    Status status;
    double residual;
    std::string detail;
};

std::string to_string(LawCheck::Status status);

struct LawReport {
    std::string law;
    std::vector<LawCheck> checks;
    bool ok() const;
};

/// Checks normalization, criticality, coefficient signs, positivity of L and
/// the derivative asymptotics 1 - f'(1 - x) ~ (1 + alpha) x^alpha L(x) on a
/// grid x -> 0. Reports; never throws.
LawReport validate(const OffspringLaw& law);

}  // namespace gw
