#include "gw/verify.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "gw/bounds.hpp"
#include "gw/estimator.hpp"
#include "gw/exact_engine.hpp"
#include "gw/limit_process.hpp"
#include "gw/simulator.hpp"

namespace gw {

namespace {

using nlohmann::json;

struct Context {
    std::uint64_t seed;
    unsigned workers;

    McConfig mc(int id, std::uint64_t sub = 0) const {
        McConfig c;
        c.seed = seed;
        c.workers = workers;
        c.stream_base = (static_cast<std::uint64_t>(id) << 48) + (sub << 32);
        return c;
    }
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

bool within(double v, double lo, double hi) { return v >= lo && v <= hi; }

json result_json(const EstimatorResult& r) {
    return {{"estimate", r.estimate}, {"std_error", r.std_error}, {"n_samples", r.n_samples},
            {"censor_lo", r.censor_lo}, {"censor_hi", r.censor_hi}, {"n_censored", r.n_censored}};
}

void c1_geometric_closed_forms(const Context&, CriterionResult& out) {
    const auto law = OffspringLaw::geometric();
    const std::size_t n = 10000;
    const auto table = full_iterate_table(law, n);
    double q_err = 0.0, d_err = 0.0;
    for (std::size_t k = 0; k <= n; ++k) {
        const double kp1 = static_cast<double>(k + 1);
        q_err = std::max(q_err, std::fabs(table.Q_values[k] * kp1 - 1.0));
        if (k >= 1) d_err = std::max(d_err, std::fabs(table.d_values[k] * kp1 * kp1 / 4.0 - 1.0));
    }
    out.pass = q_err <= 1e-12 && d_err <= 1e-12;
    out.detail = "max|Q(n)(n+1)-1| = " + fmt(q_err) + ", max|d_n(n+1)^2/4-1| = " + fmt(d_err);
    out.data = {{"q_rel_err", q_err}, {"d_rel_err", d_err}, {"n", n}};
}

void c2_binary_slack(const Context&, CriterionResult& out) {
    const auto law = OffspringLaw::binary();
    const std::size_t n = 100000;
    const double q = iterate_extinction(law, n).Q_values[n];
    const double nq = static_cast<double>(n) * q;
    const double ratio = slack_Q_asymptote(law, static_cast<double>(n)) / q;
    out.pass = within(nq, 1.96, 2.00) && within(ratio, 0.98, 1.02);
    out.detail = "n Q(n) = " + fmt(nq) + ", slack/Q = " + fmt(ratio);
    out.data = {{"nQ", nq}, {"slack_ratio", ratio}};
}

void c3_restricted_mean(const Context&, CriterionResult& out) {
    const std::size_t j = 100000;
    const auto a = restricted_mean_a(OffspringLaw::binary(), j);
    const double ratio = a[j] / static_cast<double>(j);
    out.pass = within(ratio, 0.326, 0.340);
    out.detail = "a_j/j = " + fmt(ratio) + " at j = 1e5";
    out.data = {{"ratio", ratio}};
}

void c4_total_progeny(const Context&, CriterionResult& out) {
    const auto law = OffspringLaw::binary();
    const std::uint64_t n = 1000000;
    // Tail from the closed-form pmf, summed from the small terms up.
    // P(S = 2r+1) = c_r / (2(r+1)) with c_r = C(2r, r)/4^r, for 2r+1 < n.
    std::vector<double> pmf;
    double c = 1.0;
    for (std::uint64_t r = 0; 2 * r + 1 < n; ++r) {
        if (r > 0) c *= static_cast<double>(2 * r - 1) / static_cast<double>(2 * r);
        pmf.push_back(c / (2.0 * static_cast<double>(r + 1)));
    }
    double head = 0.0;
    for (auto it = pmf.rbegin(); it != pmf.rend(); ++it) head += *it;
    const double tail_sum = 1.0 - head;
    const double tail_identity = binary_total_progeny_tail(n);
    const double scaled = std::sqrt(static_cast<double>(n)) * tail_sum;

    const std::size_t n_max = 2000;
    const auto series = total_progeny_pmf(law, n_max);
    const auto dwass = dwass_oracle_batch(law, n_max);
    double err = 0.0, err_closed = 0.0;
    for (std::size_t k = 1; k <= n_max; ++k) {
        err = std::max(err, std::fabs(series[k] - dwass[k]));
        err_closed = std::max(err_closed, std::fabs(series[k] - binary_total_progeny_pmf(k)));
    }
    out.pass = within(scaled, 0.790, 0.806) && err <= 1e-12 && err_closed <= 1e-12;
    out.detail = "sqrt(n) P(S >= n) = " + fmt(scaled) + ", series vs Dwass max err = " + fmt(err) +
                 ", vs closed form = " + fmt(err_closed);
    out.data = {{"scaled_tail", scaled},
                {"tail_identity_scaled", std::sqrt(static_cast<double>(n)) * tail_identity},
                {"series_vs_dwass", err},
                {"series_vs_closed_form", err_closed}};
}

void c5_oracle_equivalence(const Context&, CriterionResult& out) {
    const std::size_t j = 100;
    out.pass = true;
    std::ostringstream detail;
    for (const auto& law : {OffspringLaw::binary(), OffspringLaw::geometric()}) {
        const auto hj = bivariate_hj(law, j, j);
        const auto dwass = dwass_oracle_batch(law, j);
        double err = 0.0;
        for (std::size_t k = 1; k <= j; ++k) err = std::max(err, std::fabs(hj[k] - dwass[k]));
        out.pass = out.pass && err <= 1e-12 && hj[0] == 0.0;
        if (!detail.str().empty()) detail << "; ";
        detail << law.name() << " max err = " << fmt(err);
        out.data[law.name()] = err;
    }
    out.detail = detail.str();
}

void c6_total_identity(const Context& ctx, CriterionResult& out) {
    const std::size_t m = 1000;
    const auto r = estimate_EM(OffspringLaw::binary(), m, m, 10000, ctx.mc(6));
    const double z = (r.estimate - static_cast<double>(m)) / r.std_error;
    out.pass = std::fabs(z) <= 4.0;
    out.detail = "E M_m(m) = " + fmt(r.estimate) + " +- " + fmt(r.std_error) + " (z = " + fmt(z) + ")";
    out.data = result_json(r);
}

void c7_log_growth(const Context& ctx, CriterionResult& out) {
    const std::size_t m = 10000;
    const auto r = estimate_EM(OffspringLaw::binary(), m, 1, 10000, ctx.mc(7));
    const double ratio = r.estimate / std::log(static_cast<double>(m));
    out.pass = within(ratio, 0.8, 1.2);
    out.detail = "E M_m(1)/log m = " + fmt(ratio) + " (E M = " + fmt(r.estimate) + " +- " +
                 fmt(r.std_error) + ")";
    out.data = result_json(r);
    out.data["ratio"] = ratio;
}

void c8_window_growth(const Context& ctx, CriterionResult& out) {
    const std::size_t m = 100000, j = 10;
    const auto r = estimate_EM(OffspringLaw::binary(), m, j, 1000, ctx.mc(8));
    const double ratio = r.estimate / (static_cast<double>(j) * std::log(static_cast<double>(m) / j));
    out.pass = within(ratio, 0.8, 1.2);
    out.detail = "E M_m(j)/(j log(m/j)) = " + fmt(ratio);
    out.data = result_json(r);
    out.data["ratio"] = ratio;
}

void c9_tail_regime_c(const Context& ctx, CriterionResult& out) {
    const std::uint64_t n = 100;
    const auto r = estimate_tail_M(OffspringLaw::binary(), 1, n, 1000000, 2000, ctx.mc(9));
    const double lo = static_cast<double>(n) * r.censor_lo;
    const double hi = static_cast<double>(n) * r.censor_hi;
    out.pass = hi >= 0.8 && lo <= 1.25;
    out.detail = "n [lo, hi] = [" + fmt(lo) + ", " + fmt(hi) + "] vs [0.8, 1.25]";
    out.data = result_json(r);
}

void c10_small_tail(const Context& ctx, CriterionResult& out) {
    const auto law = OffspringLaw::binary();
    const auto r = estimate_tail_M(law, 2, 3, 100000, 2000, ctx.mc(10));
    const auto exact = window_tail_bruteforce(law, 2, 3);
    const double lo = r.censor_lo - 4.0 * r.std_error;
    const double hi = r.censor_hi + 4.0 * r.std_error;
    out.pass = lo <= 0.5 && 0.5 <= hi && exact.lo <= 0.5 && 0.5 <= exact.hi;
    out.detail = "MC [" + fmt(r.censor_lo) + ", " + fmt(r.censor_hi) + "] +- 4SE, oracle [" +
                 fmt(exact.lo) + ", " + fmt(exact.hi) + "]";
    out.data = result_json(r);
    out.data["oracle_lo"] = exact.lo;
    out.data["oracle_hi"] = exact.hi;
}

void c11_vstar_one(const Context& ctx, CriterionResult& out) {
    const auto r = estimate_EVstar(OffspringLaw::binary(), {1.0}, 1000, 2000, ctx.mc(11)).front();
    out.pass = within(r.estimate, 0.60, 0.73);
    out.detail = "E V*(1) = " + fmt(r.estimate) + " +- " + fmt(r.std_error);
    out.data = result_json(r);
}

void c12_vstar_slope(const Context& ctx, CriterionResult& out) {
    const std::vector<double> Ts{2, 4, 8, 16};
    const auto rs = estimate_EVstar(OffspringLaw::binary(), Ts, 1000, 2000, ctx.mc(12));
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < Ts.size(); ++i) {
        const double x = std::log(Ts[i]);
        sx += x;
        sy += rs[i].estimate;
        sxx += x * x;
        sxy += x * rs[i].estimate;
    }
    const double k = static_cast<double>(Ts.size());
    const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    out.pass = within(slope, 0.8, 1.2);
    std::ostringstream d;
    d << "slope = " << fmt(slope) << "; E V*(T):";
    for (std::size_t i = 0; i < Ts.size(); ++i) {
        d << ' ' << fmt(rs[i].estimate);
        out.data["T" + std::to_string(static_cast<int>(Ts[i]))] = result_json(rs[i]);
    }
    out.detail = d.str();
    out.data["slope"] = slope;
}

void c13_yaglom(const Context& ctx, CriterionResult& out) {
    const auto sample = conditioned_scaled_sizes(OffspringLaw::binary(), 1000, 10000, ctx.mc(13));
    const double ks = ks_distance(sample, [](double x) { return x <= 0 ? 0.0 : -std::expm1(-x); });
    out.pass = ks <= 0.03;
    out.detail = "KS vs Exp(1) = " + fmt(ks) + " over " + std::to_string(sample.size()) + " survivors";
    out.data = {{"ks", ks}, {"n", sample.size()}};
}

void c14_bounds(const Context& ctx, CriterionResult& out) {
    bool ok = true;
    int checked = 0, skipped = 0;
    std::uint64_t sub = 0;
    for (const auto& law : {OffspringLaw::binary(), OffspringLaw::geometric()}) {
        for (const auto& rep : check_bound_grid(law, 100000, ctx.mc(14, sub++))) {
            if (rep.verdict == Verdict::skipped) {
                ++skipped;
                continue;
            }
            ++checked;
            if (rep.verdict != Verdict::holds) ok = false;
            out.data["reports"].push_back({{"bound", rep.bound_name}, {"law", rep.law}, {"m", rep.m},
                                           {"k", rep.k}, {"rhs", rep.rhs_value},
                                           {"lhs", rep.mc_lhs.estimate},
                                           {"verdict", to_string(rep.verdict)}});
        }
    }
    bool moments = true;
    for (const auto& law : {OffspringLaw::binary(), OffspringLaw::geometric(),
                            OffspringLaw::stable(0.5, 2.0 / 3.0), OffspringLaw::stable(1.0, 0.25),
                            OffspringLaw::zipf(0.5)}) {
        for (const auto& c : truncated_moment_check(law, 1000)) moments = moments && c.holds;
    }
    const auto bin_r2 = truncated_moment_check(OffspringLaw::binary(), 2).back();
    const bool equality = bin_r2.lhs == 1.0 && bin_r2.rhs == 1.0;
    out.pass = ok && moments && equality && checked > 0;
    out.detail = std::to_string(checked) + " bound checks hold (" + std::to_string(skipped) +
                 " outside the y0 regime), truncated moment inequality " + (moments ? "holds" : "FAILS") +
                 " for R <= 1000, BIN R=2 equality " + (equality ? "yes" : "no");
}

void c15_two_methods(const Context& ctx, CriterionResult& out) {
    const auto gw = estimate_EVstar(OffspringLaw::binary(), {4.0}, 1000, 2000, ctx.mc(15, 0)).front();
    const auto cs = csbp_alpha1_vstar({4.0}, 0.01, 10000, ctx.mc(15, 1)).front();
    const double diff = std::fabs(gw.estimate - cs.estimate);
    const double band = 1.96 * std::hypot(gw.std_error, cs.std_error);
    out.pass = diff <= band;
    out.detail = "GW " + fmt(gw.estimate) + " +- " + fmt(gw.std_error) + ", CSBP " + fmt(cs.estimate) +
                 " +- " + fmt(cs.std_error) + ", |diff| = " + fmt(diff) + " vs band " + fmt(band);
    out.data = {{"gw", result_json(gw)}, {"csbp", result_json(cs)}};
}

void c16_regime_a(const Context& ctx, CriterionResult& out) {
    const std::uint64_t n = 400;
    const auto pair = estimate_tail_pair(OffspringLaw::binary(), n, n, 1000000, 10000, ctx.mc(16));
    const double ratio = pair.window.estimate / pair.total.estimate;
    const double exact = binary_total_progeny_tail(n);
    const double z = (pair.total.estimate - exact) / pair.total.std_error;
    out.pass = within(ratio, 0.85, 1.15) && std::fabs(z) <= 4.0;
    out.detail = "ratio = " + fmt(ratio) + ", P(M(inf) >= n) = " + fmt(pair.total.estimate) +
                 " vs Dwass " + fmt(exact) + " (z = " + fmt(z) + ")";
    out.data = {{"window", result_json(pair.window)}, {"total", result_json(pair.total)},
                {"ratio", ratio}, {"dwass_tail", exact}};
}

struct Criterion {
    int id;
    const char* suite;
    const char* title;
    void (*run)(const Context&, CriterionResult&);
};

const Criterion kCriteria[] = {
    {1, "exact", "geometric closed forms", c1_geometric_closed_forms},
    {2, "exact", "binary survival asymptote", c2_binary_slack},
    {3, "exact", "restricted mean a_j/j", c3_restricted_mean},
    {4, "exact", "total progeny tail and series oracle", c4_total_progeny},
    {5, "exact", "bivariate series vs Dwass", c5_oracle_equivalence},
    {6, "mc-fast", "E M_m(m) = m", c6_total_identity},
    {7, "mc-fast", "E M_m(1) ~ log m", c7_log_growth},
    {8, "mc-fast", "E M_m(j) ~ j log(m/j)", c8_window_growth},
    {9, "mc-full", "P(M(1) >= n) ~ alpha/n", c9_tail_regime_c},
    {10, "mc-fast", "small-case tail oracle", c10_small_tail},
    {11, "mc-full", "E V*(1) = 2/3", c11_vstar_one},
    {12, "mc-full", "E V*(T) ~ log T", c12_vstar_slope},
    {13, "mc-fast", "conditioned size vs Exp(1)", c13_yaglom},
    {14, "mc-fast", "maximum tail bounds and truncated moments", c14_bounds},
    {15, "mc-full", "CSBP vs GW for E V*(4)", c15_two_methods},
    {16, "mc-fast", "M(n) vs M(inf) tails at j = n", c16_regime_a},
};

}  // namespace

std::string criterion_suite(int id) {
    for (const auto& c : kCriteria)
        if (c.id == id) return c.suite;
    throw std::invalid_argument("unknown criterion " + std::to_string(id));
}

std::vector<CriterionResult> run_verify(const VerifyOptions& options,
                                        const std::function<void(const CriterionResult&)>& progress) {
    const std::string& suite = options.suite;
    if (suite != "all" && suite != "exact" && suite != "mc-fast" && suite != "mc-full")
        throw std::invalid_argument("unknown suite '" + suite + "'");
    const Context ctx{options.seed ? options.seed : kDefaultSeed, std::max(1u, options.workers)};
    std::vector<CriterionResult> results;
    for (const auto& c : kCriteria) {
        if (suite != "all" && suite != c.suite) continue;
        if (!options.only.empty() &&
            std::find(options.only.begin(), options.only.end(), c.id) == options.only.end())
            continue;
        CriterionResult r;
        r.id = c.id;
        r.suite = c.suite;
        r.title = c.title;
        const auto start = std::chrono::steady_clock::now();
        try {
            c.run(ctx, r);
        } catch (const std::exception& e) {
            r.pass = false;
            r.detail = std::string("error: ") + e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (progress) progress(r);
        results.push_back(std::move(r));
    }
    return results;
}

std::string format_criterion_line(const CriterionResult& r) {
    char head[96];
    std::snprintf(head, sizeof head, "%s  C%02d [%s] ", r.pass ? "PASS" : "FAIL", r.id, r.suite.c_str());
    return std::string(head) + r.title + " :: " + r.detail;
}

}  // namespace gw
