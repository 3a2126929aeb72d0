#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "gw/offspring_law.hpp"

namespace gw {

/// Power series truncated at a degree cap: coeffs[i] is the coefficient of
/// s^i for i <= degree_cap. residual_mass is the probability carried by
/// degrees beyond the cap (or otherwise not represented), never dropped
/// silently.
struct TruncatedSeries {
    std::vector<double> coeffs;
    std::size_t degree_cap = 0;
    double residual_mass = 0.0;

    double operator[](std::size_t i) const { return i < coeffs.size() ? coeffs[i] : 0.0; }
    double sum() const;
    /// Sets coefficients in [-1e-14, 0) to zero; throws std::logic_error on
    /// anything more negative.
    void clamp_small_negatives();
};

/// Streams the coefficients of f(h(s)) for the offspring generating function
/// f and a power series h with h(0) = 0.
///
/// push(h_e) must be called for e = 0, 1, 2, ... and returns [f(h)]_e, which
/// depends on h_0..h_e only. This lets the fixed point h = s f(h) be solved in
/// a single pass: h_{e+1} = [f(h)]_e.
///
/// Cost per coefficient e:
///  - finite support of size K: O(K e) through the powers h^k
///  - geometric: O(e) from (2 - h) f(h) = 1
///  - stable, alpha < 1: O(e) from the power recurrence for (1 - h)^{1+alpha}
///  - zipf: O(e^2) through all powers h^k, k <= e
class OnlineComposer {
public:
    explicit OnlineComposer(const OffspringLaw& law);
    ~OnlineComposer();
    OnlineComposer(OnlineComposer&&) noexcept;
    OnlineComposer& operator=(OnlineComposer&&) noexcept;

    double push(double h_e);
    std::size_t size() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// f(h) truncated at degree_cap; h must satisfy h(0) = 0.
std::vector<double> compose(const OffspringLaw& law, const std::vector<double>& h,
                            std::size_t degree_cap);

}  // namespace gw
