#pragma once

#include <cstdint>
#include <functional>

namespace gw::special {

/// Hurwitz zeta sum_{i>=0} (a + i)^{-s}, for s > 1 and a > 0.
double hurwitz_zeta(double s, double a);

/// |binom(beta, k)| for real beta and integer k >= 0 using the multiplicative
/// recurrence binom(beta, k) = binom(beta, k - 1) * (beta - k + 1) / k.
double abs_binomial(double beta, std::uint64_t k);

/// sum_{j >= j0} phi(j) * s^j for 0 <= s < 1 and a smooth, slowly varying
/// phi. Uses the midpoint Euler-Maclaurin form: the integral of phi(x) s^x
/// from j0 - 1/2 to infinity plus a first-derivative correction. Intended for
/// j0 in the thousands where the correction terms are below 1e-15.
double smooth_tail_sum(const std::function<double(double)>& phi, double s, double j0);

}  // namespace gw::special
