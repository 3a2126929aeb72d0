#include "gw/special.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gw::special {

namespace {

// B_{2k} / (2k)! for k = 1..8.
constexpr double kBernoulliOverFactorial[] = {
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0,
    1.0 / 74724249600.0,
    -3617.0 / 10670622842880000.0,
};

constexpr double kShiftThreshold = 24.0;

}  // namespace

double hurwitz_zeta(double s, double a) {
    if (!(s > 1.0) || !(a > 0.0)) throw std::domain_error("hurwitz_zeta: need s > 1, a > 0");
    double head = 0.0;
    while (a < kShiftThreshold) {
        head += std::pow(a, -s);
        a += 1.0;
    }
    const double a_pow = std::pow(a, -s);
    double tail = a * a_pow / (s - 1.0) + 0.5 * a_pow;
    // Rising factorial s (s+1) ... (s + 2k - 2) times a^{-s-2k+1}.
    double rising = s;
    double power = a_pow / a;
    const double inv_a2 = 1.0 / (a * a);
    for (int k = 0; k < 8; ++k) {
        tail += kBernoulliOverFactorial[k] * rising * power;
        rising *= (s + 2 * k + 1) * (s + 2 * k + 2);
        power *= inv_a2;
    }
    return head + tail;
}

double abs_binomial(double beta, std::uint64_t k) {
    double value = 1.0;
    for (std::uint64_t i = 1; i <= k; ++i) {
        value *= (beta - static_cast<double>(i) + 1.0) / static_cast<double>(i);
        if (value == 0.0) return 0.0;
    }
    return std::fabs(value);
}

double smooth_tail_sum(const std::function<double(double)>& phi, double s, double j0) {
    if (s <= 0.0) return 0.0;
    if (!(s < 1.0)) throw std::domain_error("smooth_tail_sum: need s < 1");
    const double log_s = std::log(s);
    auto term = [&](double x) { return phi(x) * std::exp(x * log_s); };
    thread_local boost::math::quadrature::exp_sinh<double> integrator;
    const double a = j0 - 0.5;
    double error = 0.0;
    const double integral =
        integrator.integrate(term, a, std::numeric_limits<double>::infinity(), 1e-13, &error);
    const double derivative = 0.5 * (term(a + 1.0) - term(a - 1.0));
    return integral - derivative / 24.0;
}

}  // namespace gw::special
