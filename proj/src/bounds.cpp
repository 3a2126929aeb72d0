#include "gw/bounds.hpp"

#include <cmath>
#include <stdexcept>

#include "gw/simulator.hpp"

namespace gw {

namespace {

void check_vah1_args(std::uint64_t k, double y0, std::uint64_t R) {
    if (k < 1) throw std::invalid_argument("vah1: k must be >= 1");
    if (!(y0 > 0.0)) throw std::invalid_argument("vah1: y0 must be positive");
    if (R < 2) throw std::invalid_argument("vah1: R must be >= 2");
}

}  // namespace

double vah1_rhs(const OffspringLaw& law, std::uint64_t m, std::uint64_t k, double y0,
                std::uint64_t R) {
    check_vah1_args(k, y0, R);
    const double md = static_cast<double>(m);
    const double mB = md * law.truncated_variance(R) / 2.0;
    // log of the inner denominator 1/y0 + (e^2 + e^{y0 R}) m B_R / 2.
    double log_den;
    if (mB == 0.0) {
        log_den = -std::log(y0);
    } else {
        const double a = -std::log(y0);
        const double big = std::max(2.0, y0 * static_cast<double>(R));
        const double small = std::min(2.0, y0 * static_cast<double>(R));
        const double b = std::log(mB) + big + std::log1p(std::exp(small - big));
        const double hi = std::max(a, b);
        log_den = hi + std::log1p(std::exp(std::min(a, b) - hi));
    }
    const double x = std::exp(-log_den);
    const double power = std::expm1(static_cast<double>(k) * std::log1p(x));
    return (y0 + 1.0 / static_cast<double>(R)) / power + md * law.tail_prob(R);
}

double vah1_rhs_direct(const OffspringLaw& law, std::uint64_t m, std::uint64_t k, double y0,
                       std::uint64_t R) {
    check_vah1_args(k, y0, R);
    const double md = static_cast<double>(m);
    const double den =
        1.0 / y0 + (std::exp(2.0) + std::exp(y0 * static_cast<double>(R))) * md * law.truncated_variance(R) / 2.0;
    const double base = 1.0 + 1.0 / den;
    return (y0 + 1.0 / static_cast<double>(R)) / (std::pow(base, static_cast<double>(k)) - 1.0) +
           md * law.tail_prob(R);
}

double doob_rhs(const OffspringLaw& law, std::uint64_t m, std::uint64_t k) {
    const auto b = law.factorial_variance();
    if (!b) throw std::invalid_argument("doob bound needs a law with finite variance");
    if (k < 1) throw std::invalid_argument("doob bound: k must be >= 1");
    const double kd = static_cast<double>(k);
    return (static_cast<double>(m) * *b + 1.0) / (kd * kd);
}

std::optional<Vah1Parameters> default_vah1_parameters(const OffspringLaw& law, std::uint64_t m,
                                                      std::uint64_t k, std::string* reason) {
    auto skip = [&](const char* why) -> std::optional<Vah1Parameters> {
        if (reason) *reason = why;
        return std::nullopt;
    };
    const std::uint64_t R = k / 2;
    if (R < 2) return skip("R = k/2 below 2");
    const double mB = static_cast<double>(m) * law.truncated_variance(k);
    if (!(mB > 0.0)) return skip("m B_k = 0, y0 undefined");
    const double x = static_cast<double>(k) / mB;
    if (!(x > std::exp(1.0))) return skip("k/(m B_k) <= e, y0 undefined");
    const double kd = static_cast<double>(k);
    const double y0 = 2.0 / kd * std::log(x) - 3.0 / kd * std::log(std::log(x));
    if (!(y0 > 0.0)) return skip("y0 <= 0");
    return Vah1Parameters{y0, R};
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::holds: return "holds";
        case Verdict::violated_beyond_3se: return "violated_beyond_3SE";
        case Verdict::skipped: return "skipped";
    }
    return "unknown";
}

BoundReport check_bound(const std::string& bound_name, const OffspringLaw& law, std::uint64_t m,
                        std::uint64_t k, std::uint64_t n_samples, const McConfig& config) {
    BoundReport report;
    report.bound_name = bound_name;
    report.law = law.name();
    report.m = m;
    report.k = k;
    if (bound_name == "doob") {
        if (!law.factorial_variance()) {
            report.reason = "infinite variance";
            return report;
        }
        report.rhs_value = doob_rhs(law, m, k);
    } else if (bound_name == "vah1") {
        std::string reason;
        const auto params = default_vah1_parameters(law, m, k, &reason);
        if (!params) {
            report.reason = reason;
            return report;
        }
        report.y0 = params->y0;
        report.R = params->R;
        report.rhs_value = vah1_rhs(law, m, k, params->y0, params->R);
    } else {
        throw std::invalid_argument("unknown bound '" + bound_name + "'");
    }
    report.mc_lhs = estimate_generation_max_tail(law, m, k, n_samples, config);
    const bool holds = report.mc_lhs.censor_hi <= report.rhs_value + 3.0 * report.mc_lhs.std_error;
    report.verdict = holds ? Verdict::holds : Verdict::violated_beyond_3se;
    return report;
}

std::vector<BoundReport> check_bound_grid(const OffspringLaw& law, std::uint64_t n_samples,
                                          const McConfig& config) {
    std::vector<BoundReport> out;
    std::uint64_t cell = 0;
    for (const char* name : {"doob", "vah1"}) {
        for (std::uint64_t m : {1, 4, 16}) {
            for (std::uint64_t k : {4, 8, 16}) {
                McConfig c = config;
                c.stream_base = config.stream_base + (cell++ << 32);
                out.push_back(check_bound(name, law, m, k, n_samples, c));
            }
        }
    }
    return out;
}

std::vector<TruncatedMomentCheck> truncated_moment_check(const OffspringLaw& law, std::uint64_t R_max) {
    std::vector<TruncatedMomentCheck> out;
    double lhs = 0.0;
    double rhs = 0.0;
    for (std::uint64_t R = 1; R <= R_max; ++R) {
        const double Rd = static_cast<double>(R);
        lhs += Rd * (Rd - 1.0) * law.pmf(R);
        rhs += 2.0 * Rd * law.tail_prob(R);
        // Relative slack for rounding in the two running sums.
        out.push_back({R, lhs, rhs, lhs <= rhs * (1.0 + 1e-12) + 1e-15});
    }
    return out;
}

std::vector<MaxScalingPoint> max_scaling_diagnostic(const OffspringLaw& law, std::uint64_t k_max,
                                           std::uint64_t n_samples, const McConfig& config) {
    std::vector<MaxScalingPoint> out;
    std::uint64_t cell = 0;
    for (std::uint64_t k = 64; k <= k_max; k *= 2) {
        const std::uint64_t m = k / 16;
        McConfig c = config;
        c.stream_base = config.stream_base + (cell++ << 32);
        const auto p = estimate_generation_max_tail(law, m, k, n_samples, c);
        const double kd = static_cast<double>(k);
        const double ratio = p.estimate * kd * kd / (static_cast<double>(m) * law.truncated_variance(k));
        out.push_back({k, m, p, ratio});
    }
    return out;
}

}  // namespace gw
