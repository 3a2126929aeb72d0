#include "gw/offspring_law.hpp"

#include <algorithm>
#include <boost/math/special_functions/zeta.hpp>
#include <functional>
#include <limits>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "gw/special.hpp"

namespace gw {

namespace detail {

struct LawData {
    Family family = Family::finite;
    double alpha = 1.0;
    double param = 0.0;

    // p_0..p_K and T(K) = P(xi > K).
    std::vector<double> head;
    double head_tail_mass = 0.0;

    // Coefficient tables of the nonnegative series
    //   F(s)       = sum_j P(xi > j) s^j                     (t)
    //   (f-s)/(1-s)^2 = sum_l s^l sum_{i>l} P(xi > i)        (r)
    //   (1-f')/(1-s)  = sum_i s^i E{xi; xi >= i + 2}         (u)
    // Used by the finite and zipf families; zipf adds a smooth tail.
    std::vector<double> t, r, u;

    std::vector<double> alias_prob;
    std::vector<std::uint32_t> alias_index;

    bool binary_like = false;
};

}  // namespace detail

namespace {

using detail::LawData;

constexpr std::uint64_t kStableHead = 1024;
constexpr std::uint64_t kZipfHead = 2048;
constexpr std::uint64_t kGeometricHead = 40;

double zipf_sigma(const LawData& d) { return 2.0 + d.alpha; }

// P(xi > k) for stable alpha < 1 beyond the tabulated head.
double stable_tail_far(double alpha, double c, std::uint64_t k) {
    const double kd = static_cast<double>(k);
    return c * alpha *
           std::exp(std::lgamma(kd - alpha) - std::lgamma(kd + 1.0) - std::lgamma(1.0 - alpha));
}

double stable_pmf_far(double alpha, double c, std::uint64_t k) {
    const double kd = static_cast<double>(k);
    return c * (1.0 + alpha) * alpha *
           std::exp(std::lgamma(kd - 1.0 - alpha) - std::lgamma(kd + 1.0) -
                    std::lgamma(1.0 - alpha));
}

double zipf_t(const LawData& d, double j) {
    return d.param * special::hurwitz_zeta(zipf_sigma(d), j + 1.0);
}
double zipf_r(const LawData& d, double l) {
    const double s = zipf_sigma(d);
    return d.param * (special::hurwitz_zeta(s - 1.0, l + 2.0) -
                      (l + 1.0) * special::hurwitz_zeta(s, l + 2.0));
}
double zipf_u(const LawData& d, double i) {
    return d.param * special::hurwitz_zeta(zipf_sigma(d) - 1.0, i + 2.0);
}

double horner(const std::vector<double>& coeffs, double s) {
    double acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * s + *it;
    return acc;
}

enum class Table { t, r, u };

// sum_j table_j s^j over the full (possibly infinite) index range.
double series_value(const LawData& d, Table which, double s) {
    const std::vector<double>& coeffs = which == Table::t ? d.t : which == Table::r ? d.r : d.u;
    double value = horner(coeffs, s);
    if (d.family == Family::zipf && s > 0.0) {
        const double j0 = static_cast<double>(coeffs.size());
        std::function<double(double)> phi;
        switch (which) {
            case Table::t: phi = [&d](double j) { return zipf_t(d, j); }; break;
            case Table::r: phi = [&d](double j) { return zipf_r(d, j); }; break;
            case Table::u: phi = [&d](double j) { return zipf_u(d, j); }; break;
        }
        value += special::smooth_tail_sum(phi, s, j0);
    }
    return value;
}

void fill_series_tables(LawData& d, std::size_t n_terms) {
    d.t.assign(n_terms, 0.0);
    d.r.assign(n_terms, 0.0);
    d.u.assign(n_terms, 0.0);
    if (d.family == Family::zipf) {
        for (std::size_t j = 0; j < n_terms; ++j) {
            const double jd = static_cast<double>(j);
            d.t[j] = j == 0 ? 1.0 - d.head[0] : zipf_t(d, jd);
            d.r[j] = zipf_r(d, jd);
            d.u[j] = zipf_u(d, jd);
        }
        return;
    }
    // Finite support: accumulate from the top so that no entry is formed by
    // subtracting from one.
    const std::size_t K = d.head.size() - 1;
    double acc = 0.0;
    for (std::size_t j = K; j-- > 0;) {
        acc += d.head[j + 1];
        if (j < n_terms) d.t[j] = acc;
    }
    acc = 0.0;
    for (std::size_t l = n_terms; l-- > 0;) {
        if (l + 1 < n_terms) acc += d.t[l + 1];
        d.r[l] = acc;
    }
    acc = 0.0;
    for (std::size_t i = n_terms; i-- > 0;) {
        const std::size_t k = i + 2;
        if (k <= K) acc += static_cast<double>(k) * d.head[k];
        d.u[i] = acc;
    }
}

// Vose alias table over head outcomes 0..K plus one tail bucket.
void build_alias(LawData& d) {
    std::vector<double> weights(d.head.begin(), d.head.end());
    weights.push_back(d.head_tail_mass);
    const std::size_t n = weights.size();
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    std::vector<double> scaled(n);
    for (std::size_t i = 0; i < n; ++i) scaled[i] = std::max(weights[i], 0.0) * n / total;
    d.alias_prob.assign(n, 1.0);
    d.alias_index.resize(n);
    std::iota(d.alias_index.begin(), d.alias_index.end(), 0u);
    std::vector<std::uint32_t> small, large;
    for (std::size_t i = 0; i < n; ++i) (scaled[i] < 1.0 ? small : large).push_back(i);
    while (!small.empty() && !large.empty()) {
        const std::uint32_t s = small.back();
        small.pop_back();
        const std::uint32_t l = large.back();
        d.alias_prob[s] = scaled[s];
        d.alias_index[s] = l;
        scaled[l] = (scaled[l] + scaled[s]) - 1.0;
        if (scaled[l] < 1.0) {
            large.pop_back();
            small.push_back(l);
        }
    }
    for (auto i : large) d.alias_prob[i] = 1.0;
    for (auto i : small) d.alias_prob[i] = 1.0;
}

double tail_prob_impl(const LawData& d, std::uint64_t k) {
    switch (d.family) {
        case Family::binary:
            return k >= 2 ? 0.0 : 0.5;
        case Family::geometric:
            return k > 1100 ? 0.0 : std::ldexp(1.0, -static_cast<int>(k) - 1);
        case Family::stable:
            if (k == 0) return 1.0 - d.param;
            if (k < d.t.size()) return d.t[k];
            if (d.alpha == 1.0) return 0.0;
            return stable_tail_far(d.alpha, d.param, k);
        case Family::zipf:
            if (k < d.t.size()) return d.t[k];
            return zipf_t(d, static_cast<double>(k));
        case Family::finite:
            return k < d.t.size() ? d.t[k] : 0.0;
    }
    return 0.0;
}

// Smallest k > K with P(xi > k) <= u, for u in (0, P(xi > K)].
std::uint64_t invert_tail(const LawData& d, double u) {
    const std::uint64_t K = d.head.size() - 1;
    std::uint64_t lo = K;  // tail(lo) > u
    std::uint64_t hi = K + 1;
    while (tail_prob_impl(d, hi) > u) {
        lo = hi;
        if (hi >= kMaxOffspring / 2) return kMaxOffspring;
        hi = 2 * hi;
    }
    while (hi - lo > 1) {
        const std::uint64_t mid = lo + (hi - lo) / 2;
        if (tail_prob_impl(d, mid) > u)
            lo = mid;
        else
            hi = mid;
    }
    return hi;
}

void check_unit_interval(double s, const char* what) {
    if (!(s >= 0.0 && s <= 1.0)) {
        std::ostringstream os;
        os << what << ": argument " << s << " outside [0, 1]";
        throw std::domain_error(os.str());
    }
}

}  // namespace

std::string to_string(Family family) {
    switch (family) {
        case Family::binary: return "binary";
        case Family::geometric: return "geometric";
        case Family::stable: return "stable";
        case Family::zipf: return "zipf";
        case Family::finite: return "finite";
    }
    return "unknown";
}

OffspringLaw::OffspringLaw(std::shared_ptr<const LawData> data) : data_(std::move(data)) {}

OffspringLaw OffspringLaw::binary() {
    auto d = std::make_shared<LawData>();
    d->family = Family::binary;
    d->alpha = 1.0;
    d->head = {0.5, 0.0, 0.5};
    d->binary_like = true;
    build_alias(*d);
    return OffspringLaw(d);
}

OffspringLaw OffspringLaw::geometric() {
    auto d = std::make_shared<LawData>();
    d->family = Family::geometric;
    d->alpha = 1.0;
    d->head.resize(kGeometricHead + 1);
    for (std::uint64_t k = 0; k <= kGeometricHead; ++k)
        d->head[k] = std::ldexp(1.0, -static_cast<int>(k) - 1);
    d->head_tail_mass = std::ldexp(1.0, -static_cast<int>(kGeometricHead) - 1);
    build_alias(*d);
    return OffspringLaw(d);
}

OffspringLaw OffspringLaw::stable(double alpha, double c) {
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw std::invalid_argument("stable law: alpha must lie in (0, 1]");
    if (!(c > 0.0 && c <= 1.0 / (1.0 + alpha)))
        throw std::invalid_argument("stable law: c must lie in (0, 1/(1+alpha)]");
    auto d = std::make_shared<LawData>();
    d->family = Family::stable;
    d->alpha = alpha;
    d->param = c;
    const std::uint64_t K = alpha == 1.0 ? 2 : kStableHead;
    d->head.resize(K + 1);
    d->t.resize(K + 1);
    d->head[0] = c;
    d->head[1] = std::max(0.0, 1.0 - c * (1.0 + alpha));
    // |binom(1 + alpha, k)| and |binom(alpha, k)| via their recurrences.
    double b_pmf = (1.0 + alpha) * alpha / 2.0;
    double b_tail = alpha;
    d->t[0] = 1.0 - c;
    d->t[1] = c * b_tail;
    for (std::uint64_t k = 2; k <= K; ++k) {
        d->head[k] = c * b_pmf;
        b_pmf *= std::fabs((1.0 + alpha - static_cast<double>(k)) / static_cast<double>(k + 1));
        b_tail *= std::fabs((alpha - static_cast<double>(k) + 1.0) / static_cast<double>(k));
        d->t[k] = c * b_tail;
    }
    d->head_tail_mass = d->t[K];
    d->binary_like = alpha == 1.0 && c == 0.5;
    build_alias(*d);
    return OffspringLaw(d);
}

OffspringLaw OffspringLaw::zipf(double alpha, std::optional<double> weight) {
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw std::invalid_argument("zipf law: alpha must lie in (0, 1]");
    const double sigma = 2.0 + alpha;
    const double zeta_mean = boost::math::zeta(sigma - 1.0) - 1.0;  // sum_{k>=2} k^{1-sigma}
    const double zeta_mass = boost::math::zeta(sigma) - 1.0;        // sum_{k>=2} k^{-sigma}
    const double w_max = 1.0 / zeta_mean;
    const double w = weight.value_or(w_max);
    if (!(w > 0.0 && w <= w_max * (1.0 + 1e-15)))
        throw std::invalid_argument("zipf law: weight must lie in (0, 1/(zeta(1+alpha)-1)]");
    auto d = std::make_shared<LawData>();
    d->family = Family::zipf;
    d->alpha = alpha;
    d->param = w;
    d->head.resize(kZipfHead + 1);
    // Criticality and normalization pin the two free masses in closed form.
    d->head[1] = std::max(0.0, 1.0 - w * zeta_mean);
    d->head[0] = w * (zeta_mean - zeta_mass);
    for (std::uint64_t k = 2; k <= kZipfHead; ++k)
        d->head[k] = w * std::pow(static_cast<double>(k), -sigma);
    fill_series_tables(*d, kZipfHead);
    d->head_tail_mass = zipf_t(*d, static_cast<double>(kZipfHead));
    build_alias(*d);
    return OffspringLaw(d);
}

OffspringLaw OffspringLaw::finite(std::vector<double> pmf) {
    if (pmf.empty()) throw std::invalid_argument("finite law: empty pmf");
    while (pmf.size() > 1 && pmf.back() == 0.0) pmf.pop_back();
    auto d = std::make_shared<LawData>();
    d->family = Family::finite;
    d->alpha = 1.0;
    d->head = std::move(pmf);
    fill_series_tables(*d, d->head.size());
    d->binary_like = d->head.size() == 3 && d->head[0] == 0.5 && d->head[1] == 0.0 &&
                     d->head[2] == 0.5;
    build_alias(*d);
    return OffspringLaw(d);
}

Family OffspringLaw::family() const { return data_->family; }
double OffspringLaw::alpha() const { return data_->alpha; }
double OffspringLaw::parameter() const { return data_->param; }
bool OffspringLaw::is_binary() const { return data_->binary_like; }
std::span<const double> OffspringLaw::head() const { return data_->head; }

std::string OffspringLaw::name() const {
    std::ostringstream os;
    os.precision(17);
    switch (data_->family) {
        case Family::binary: return "binary";
        case Family::geometric: return "geometric";
        case Family::stable: os << "stable(alpha=" << data_->alpha << ", c=" << data_->param << ")"; break;
        case Family::zipf: os << "zipf(alpha=" << data_->alpha << ", weight=" << data_->param << ")"; break;
        case Family::finite: os << "finite(K=" << data_->head.size() - 1 << ")"; break;
    }
    return os.str();
}

std::optional<std::uint64_t> OffspringLaw::support_max() const {
    const auto& d = *data_;
    if (d.family == Family::geometric || d.family == Family::zipf) return std::nullopt;
    if (d.family == Family::stable && d.alpha < 1.0) return std::nullopt;
    std::uint64_t k = d.head.size() - 1;
    while (k > 0 && d.head[k] == 0.0) --k;
    return k;
}

double OffspringLaw::pmf(std::uint64_t k) const {
    const auto& d = *data_;
    if (k < d.head.size()) return d.head[k];
    switch (d.family) {
        case Family::geometric:
            return k > 1100 ? 0.0 : std::ldexp(1.0, -static_cast<int>(k) - 1);
        case Family::stable:
            return d.alpha == 1.0 ? 0.0 : stable_pmf_far(d.alpha, d.param, k);
        case Family::zipf:
            return d.param * std::pow(static_cast<double>(k), -zipf_sigma(d));
        default:
            return 0.0;
    }
}

double OffspringLaw::tail_prob(std::uint64_t k) const { return tail_prob_impl(*data_, k); }

double OffspringLaw::complement(double q) const {
    check_unit_interval(q, "complement");
    if (q == 0.0) return 0.0;
    const auto& d = *data_;
    switch (d.family) {
        case Family::binary: return q - 0.5 * q * q;
        case Family::geometric: return q / (1.0 + q);
        case Family::stable: return q - d.param * std::pow(q, 1.0 + d.alpha);
        default: return q * series_value(d, Table::t, 1.0 - q);
    }
}

double OffspringLaw::gap(double x) const {
    check_unit_interval(x, "gap");
    if (x == 0.0) return 0.0;
    const auto& d = *data_;
    switch (d.family) {
        case Family::binary: return 0.5 * x * x;
        case Family::geometric: return x * x / (1.0 + x);
        case Family::stable: return d.param * std::pow(x, 1.0 + d.alpha);
        default: return x * x * series_value(d, Table::r, 1.0 - x);
    }
}

double OffspringLaw::derivative_complement(double x) const {
    check_unit_interval(x, "derivative_complement");
    if (x == 0.0) return 0.0;
    const auto& d = *data_;
    switch (d.family) {
        case Family::binary: return x;
        case Family::geometric: return x * (2.0 + x) / ((1.0 + x) * (1.0 + x));
        case Family::stable: return d.param * (1.0 + d.alpha) * std::pow(x, d.alpha);
        default: return x * series_value(d, Table::u, 1.0 - x);
    }
}

double OffspringLaw::pgf(double s) const {
    check_unit_interval(s, "pgf");
    const auto& d = *data_;
    switch (d.family) {
        case Family::binary: return 0.5 * (1.0 + s * s);
        case Family::geometric: return 1.0 / (2.0 - s);
        case Family::stable: return s + d.param * std::pow(1.0 - s, 1.0 + d.alpha);
        case Family::finite: return horner(d.head, s);
        case Family::zipf: return 1.0 - complement(1.0 - s);
    }
    return 0.0;
}

double OffspringLaw::pgf_derivative(double s) const {
    check_unit_interval(s, "pgf_derivative");
    const auto& d = *data_;
    switch (d.family) {
        case Family::binary: return s;
        case Family::geometric: return 1.0 / ((2.0 - s) * (2.0 - s));
        case Family::stable:
            return 1.0 - d.param * (1.0 + d.alpha) * std::pow(1.0 - s, d.alpha);
        case Family::finite: {
            double acc = 0.0;
            for (std::size_t k = d.head.size(); k-- > 1;)
                acc = acc * s + static_cast<double>(k) * d.head[k];
            return acc;
        }
        case Family::zipf: return 1.0 - derivative_complement(1.0 - s);
    }
    return 0.0;
}

double OffspringLaw::slowly_varying_L(double x) const {
    if (!(x > 0.0 && x <= 1.0)) throw std::domain_error("slowly_varying_L: x must lie in (0, 1]");
    if (data_->family == Family::stable) return data_->param;
    return gap(x) / std::pow(x, 1.0 + data_->alpha);
}

double OffspringLaw::truncated_variance(std::uint64_t R) const {
    double acc = 0.0;
    for (std::uint64_t k = 2; k <= R; ++k) {
        const double kd = static_cast<double>(k);
        acc += kd * (kd - 1.0) * pmf(k);
    }
    return acc;
}

std::optional<double> OffspringLaw::factorial_variance() const {
    const auto& d = *data_;
    switch (d.family) {
        case Family::binary: return 1.0;
        case Family::geometric: return 2.0;
        case Family::stable:
            if (d.alpha == 1.0) return 2.0 * d.param;
            return std::nullopt;
        case Family::finite: return truncated_variance(d.head.size() - 1);
        case Family::zipf: return std::nullopt;
    }
    return std::nullopt;
}

double OffspringLaw::total_mass() const {
    const auto& d = *data_;
    double head = 0.0;
    for (double p : d.head) head += p;
    return head + d.head_tail_mass;
}

double OffspringLaw::mean() const {
    const auto& d = *data_;
    double head = 0.0;
    for (std::size_t k = 1; k < d.head.size(); ++k) head += static_cast<double>(k) * d.head[k];
    const std::uint64_t K = d.head.size() - 1;
    const double Kd = static_cast<double>(K);
    double tail = 0.0;
    switch (d.family) {
        case Family::geometric:
            tail = (Kd + 2.0) * d.head_tail_mass;
            break;
        case Family::stable: {
            if (d.alpha == 1.0) break;
            // sum_{j>K} P(xi > j) = c - sum_{j=1}^{K} P(xi > j), since the
            // coefficients |binom(alpha, j)|, j >= 1, sum to one.
            double partial = 0.0;
            for (std::uint64_t j = K; j >= 1; --j) partial += d.t[j];
            tail = (Kd + 1.0) * d.head_tail_mass + (d.param - partial);
            break;
        }
        case Family::zipf:
            tail = d.param * special::hurwitz_zeta(zipf_sigma(d) - 1.0, Kd + 1.0);
            break;
        default:
            break;
    }
    return head + tail;
}

std::uint64_t OffspringLaw::sample(RngStream& rng) const {
    const auto& d = *data_;
    const std::size_t n = d.alias_prob.size();
    const double u = rng.uniform() * static_cast<double>(n);
    std::size_t i = static_cast<std::size_t>(u);
    if (i >= n) i = n - 1;
    const double frac = u - static_cast<double>(i);
    const std::size_t outcome = frac < d.alias_prob[i] ? i : d.alias_index[i];
    if (outcome < d.head.size()) return outcome;
    return invert_tail(d, rng.uniform_pos() * d.head_tail_mass);
}

std::string to_string(LawCheck::Status status) {
    switch (status) {
        case LawCheck::Status::pass: return "pass";
        case LawCheck::Status::fail: return "fail";
        case LawCheck::Status::asymptotic_only: return "asymptotic_only";
    }
    return "unknown";
}

bool LawReport::ok() const {
    return std::none_of(checks.begin(), checks.end(),
                        [](const LawCheck& c) { return c.status == LawCheck::Status::fail; });
}

LawReport validate(const OffspringLaw& law) {
    using Status = LawCheck::Status;
    LawReport report;
    report.law = law.name();
    auto add = [&](std::string name, bool ok, double residual, std::string detail = {}) {
        report.checks.push_back({std::move(name), ok ? Status::pass : Status::fail, residual,
                                 std::move(detail)});
    };

    const double mass_residual = std::fabs(law.total_mass() - 1.0);
    add("normalization", mass_residual <= 1e-12, mass_residual, "|sum p_k - 1| <= 1e-12");

    const double mean_residual = std::fabs(law.mean() - 1.0);
    add("criticality", mean_residual <= 1e-10, mean_residual, "|E xi - 1| <= 1e-10");

    double most_negative = 0.0;
    for (double p : law.head()) most_negative = std::min(most_negative, p);
    add("nonnegative_pmf", most_negative >= 0.0, 0.0 - most_negative, "p_k >= 0 on the head");

    if (law.family() == Family::stable) {
        const double c = law.parameter();
        const double c_max = 1.0 / (1.0 + law.alpha());
        add("stable_c_range", c > 0.0 && c <= c_max, std::max(0.0, c - c_max),
            "0 < c <= 1/(1+alpha)");
    }

    // Evaluations below assume a well-formed law; a defective pmf can make
    // them meaningless, which the failures above already report.
    std::vector<double> grid;
    for (int e = 0; e <= 8; ++e) grid.push_back(std::pow(10.0, -e));

    double min_L = std::numeric_limits<double>::infinity();
    for (double x : grid) min_L = std::min(min_L, law.slowly_varying_L(x));
    add("L_positive", min_L > 0.0 && std::isfinite(min_L), min_L, "min L(x) on x = 10^-k, k <= 8");

    // 1 - f'(1 - x) ~ (1 + alpha) x^alpha L(x) as x -> 0.
    double first = 0.0, last = 0.0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double x = grid[i];
        const double ratio = law.derivative_complement(x) /
                             ((1.0 + law.alpha()) * std::pow(x, law.alpha()) * law.slowly_varying_L(x));
        const double dev = std::fabs(ratio - 1.0);
        if (i == 1) first = dev;
        last = dev;
    }
    const bool converging = last <= 0.05 && last <= first + 1e-12;
    add("derivative_asymptotics", converging, last, "|ratio(1e-8) - 1| <= 0.05 and shrinking");

    LawCheck certificate{"index_certificate", Status::pass, 0.0,
                         "f(s) - s = (1-s)^{1+alpha} L(1-s) with L continuous and positive at 0"};
    if (law.family() == Family::zipf) {
        certificate.status = Status::asymptotic_only;
        certificate.residual = std::fabs(law.slowly_varying_L(1e-8) / law.slowly_varying_L(1e-6) - 1.0);
        certificate.detail = "L only slowly varying; representation holds asymptotically";
    } else if (law.family() == Family::finite) {
        const auto bvar = law.factorial_variance();
        if (!bvar || *bvar <= 0.0) {
            certificate.status = Status::fail;
            certificate.detail = "finite law needs E xi(xi-1) > 0";
        }
    }
    report.checks.push_back(certificate);
    return report;
}

}  // namespace gw
