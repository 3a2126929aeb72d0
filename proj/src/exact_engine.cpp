#include "gw/exact_engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "gw/simd/kernels.hpp"

namespace gw {

IterateTable iterate_extinction(const OffspringLaw& law, std::size_t n) {
    IterateTable table;
    table.Q_values.resize(n + 1);
    table.f0_values.resize(n + 1);
    double q = 1.0;
    for (std::size_t k = 0; k <= n; ++k) {
        table.Q_values[k] = q;
        table.f0_values[k] = 1.0 - q;
        q = law.complement(q);
    }
    return table;
}

std::vector<double> d_product(const OffspringLaw& law, std::size_t n) {
    const auto table = iterate_extinction(law, n);
    std::vector<double> d(n + 1, 1.0);
    for (std::size_t k = 1; k < n; ++k)
        d[k + 1] = d[k] * (1.0 - law.derivative_complement(table.Q_values[k]));
    return d;
}

std::vector<double> restricted_mean_a(const OffspringLaw& law, std::size_t j) {
    const auto table = iterate_extinction(law, j);
    std::vector<double> a(j + 1, 0.0);
    for (std::size_t k = 1; k <= j; ++k) {
        const double slope = 1.0 - law.derivative_complement(table.Q_values[k - 1]);
        a[k] = table.f0_values[k] + slope * a[k - 1];
    }
    return a;
}

IterateTable full_iterate_table(const OffspringLaw& law, std::size_t n) {
    IterateTable table = iterate_extinction(law, n);
    table.d_values = d_product(law, n);
    table.a_values = restricted_mean_a(law, n);
    return table;
}

TruncatedSeries total_progeny_pmf(const OffspringLaw& law, std::size_t n_max) {
    if (n_max < 1) throw std::invalid_argument("total_progeny_pmf: n_max must be >= 1");
    TruncatedSeries series;
    series.degree_cap = n_max;
    series.coeffs.assign(n_max + 1, 0.0);
    OnlineComposer composer(law);
    // h = s f(h): coefficient e + 1 of h is coefficient e of f(h), which only
    // involves h_0..h_e. One pass therefore reproduces n_max + 1 rounds of the
    // fixed-point iteration exactly.
    for (std::size_t e = 0; e < n_max; ++e) series.coeffs[e + 1] = composer.push(series.coeffs[e]);
    series.clamp_small_negatives();
    series.residual_mass = std::max(0.0, 1.0 - series.sum());
    return series;
}

namespace {

std::vector<double> truncated_pmf(const OffspringLaw& law, std::size_t length) {
    std::vector<double> p(length, 0.0);
    const auto support = law.support_max();
    const std::size_t last = support ? std::min<std::size_t>(*support + 1, length) : length;
    for (std::size_t k = 0; k < last; ++k) p[k] = law.pmf(k);
    return p;
}

std::vector<double> multiply_truncated(const std::vector<double>& a, const std::vector<double>& b,
                                       std::size_t length) {
    std::vector<double> c(length, 0.0);
    for (std::size_t e = 0; e < length; ++e) c[e] = simd::convolve_at(a, b, 0, e, e);
    return c;
}

}  // namespace

double dwass_oracle(const OffspringLaw& law, std::size_t n) {
    if (n < 1) throw std::invalid_argument("dwass_oracle: n must be >= 1");
    if (n > kDwassBudget)
        throw std::length_error("dwass_oracle: n = " + std::to_string(n) + " exceeds the budget " +
                                std::to_string(kDwassBudget));
    const std::size_t length = n;  // degrees 0..n-1
    std::vector<double> base = truncated_pmf(law, length);
    std::vector<double> result(length, 0.0);
    result[0] = 1.0;
    std::size_t power = n;
    while (power > 0) {
        if (power & 1) {
            if (power == 1) {
                // Last factor: only the coefficient n - 1 is needed.
                return simd::convolve_at(result, base, 0, length - 1, length - 1) /
                       static_cast<double>(n);
            }
            result = multiply_truncated(result, base, length);
        }
        power >>= 1;
        if (power > 0) base = multiply_truncated(base, base, length);
    }
    return result[length - 1] / static_cast<double>(n);
}

std::vector<double> dwass_oracle_batch(const OffspringLaw& law, std::size_t n_max) {
    std::vector<double> out(n_max + 1, 0.0);
    if (n_max == 0) return out;
    const std::vector<double> pmf = truncated_pmf(law, n_max);
    std::vector<double> g(n_max, 0.0), next(n_max, 0.0);
    g[0] = 1.0;
    for (std::size_t n = 1; n <= n_max; ++n) {
        // g <- g * pmf on degrees 0..n_max-1; degree n - 1 is read now.
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t k = 0; k < n_max; ++k) {
            if (pmf[k] == 0.0) continue;
            simd::axpy(pmf[k], std::span<const double>(g.data(), n_max - k),
                       std::span<double>(next.data() + k, n_max - k));
        }
        g.swap(next);
        out[n] = g[n - 1] / static_cast<double>(n);
    }
    return out;
}

double binary_total_progeny_tail(std::uint64_t n) {
    const std::uint64_t r = n / 2;
    double c = 1.0;
    for (std::uint64_t i = 1; i <= r; ++i)
        c *= static_cast<double>(2 * i - 1) / static_cast<double>(2 * i);
    return c;
}

double binary_total_progeny_pmf(std::uint64_t n) {
    if (n % 2 == 0) return 0.0;
    const std::uint64_t r = (n - 1) / 2;
    return binary_total_progeny_tail(n) / (2.0 * static_cast<double>(r + 1));
}

TruncatedSeries bivariate_hj(const OffspringLaw& law, std::size_t j, std::size_t degree_cap) {
    if (j < 1) throw std::invalid_argument("bivariate_hj: j must be >= 1");
    if (degree_cap < 1) throw std::invalid_argument("bivariate_hj: degree_cap must be >= 1");
    std::vector<double> h(degree_cap + 1, 0.0);
    for (std::size_t step = 0; step < j; ++step) {
        const std::vector<double> g = compose(law, h, degree_cap - 1);
        h[0] = 0.0;
        std::copy(g.begin(), g.end(), h.begin() + 1);
    }
    TruncatedSeries series;
    series.coeffs = std::move(h);
    series.degree_cap = degree_cap;
    series.clamp_small_negatives();
    const double fj0 = iterate_extinction(law, j).f0_values[j];
    series.residual_mass = std::max(0.0, fj0 - series.sum());
    return series;
}

double slack_Q_asymptote(const OffspringLaw& law, double n) {
    if (!(n >= 1.0)) throw std::domain_error("slack_Q_asymptote: n must be >= 1");
    const double alpha = law.alpha();
    const double target = 1.0 / n;
    auto lhs = [&](double q) { return alpha * law.gap(q) / q; };
    if (target >= lhs(1.0))
        throw std::domain_error("slack_Q_asymptote: 1/n >= alpha p_0, no root in (0, 1)");
    double lo = std::log(1e-300);
    double hi = 0.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (lhs(std::exp(mid)) < target)
            lo = mid;
        else
            hi = mid;
        // |d log q| < 1e-13 bounds the relative error of q by about 1e-13.
        if (hi - lo < 1e-13) break;
    }
    return std::exp(0.5 * (lo + hi));
}

TailConstants tail_constants(double alpha, double y) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::domain_error("tail_constants: alpha in (0, 1]");
    if (!(y > 0.0)) throw std::domain_error("tail_constants: y must be positive");
    const double g = std::tgamma(alpha / (1.0 + alpha));
    const double e = 1.0 / (1.0 + alpha);
    return {std::pow(alpha * y, e) / g, std::pow(alpha, e) / g};
}

}  // namespace gw
