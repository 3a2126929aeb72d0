#include "gw/series.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "gw/simd/kernels.hpp"

namespace gw {

double TruncatedSeries::sum() const {
    // Small terms first keeps the total stable for long decaying tails.
    double acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc += *it;
    return acc;
}

void TruncatedSeries::clamp_small_negatives() {
    for (double& c : coeffs) {
        if (c < 0.0) {
            if (c < -1e-14) throw std::logic_error("series coefficient below -1e-14");
            c = 0.0;
        }
    }
}

namespace {

enum class Method { powers, geometric, stable };

}  // namespace

struct OnlineComposer::Impl {
    Method method;
    double p0 = 0.0;
    std::vector<double> pmf;                // powers: p_1..p_K, index k
    bool unbounded = false;                 // zipf: powers of every order
    OffspringLaw law;
    std::vector<double> h;                  // h_0..h_e
    std::vector<std::vector<double>> power; // power[k] = coefficients of h^k, k >= 1
    std::vector<double> g;                  // geometric: f(h)
    std::vector<double> u, iu, v;           // stable: u = 1 - h, iu_i = i u_i, v = u^{1+alpha}
    double beta = 0.0;
    double c = 0.0;

    explicit Impl(const OffspringLaw& l) : law(l) {}

    double pmf_at(std::size_t k) {
        if (!unbounded) return k < pmf.size() ? pmf[k] : 0.0;
        while (pmf.size() <= k) pmf.push_back(law.pmf(pmf.size()));
        return pmf[k];
    }

    double push_powers(double he) {
        const std::size_t e = h.size() - 1;
        const std::size_t kmax = unbounded ? e : std::min(e, pmf.size() - 1);
        if (power.size() < kmax + 1) power.resize(kmax + 1);
        double out = e == 0 ? p0 : 0.0;
        if (e == 0) return out;
        for (std::size_t k = 1; k < power.size(); ++k)
            if (power[k].size() < e) power[k].resize(e, 0.0);  // zero below degree k
        power[1].push_back(he);
        double acc = pmf_at(1) * he;
        for (std::size_t k = 2; k <= kmax; ++k) {
            // [h^k]_e = sum_{i=1}^{e-k+1} h_i [h^{k-1}]_{e-i}
            auto& prev = power[k - 1];
            const double term = simd::convolve_at(h, prev, 1, e - (k - 1), e);
            power[k].push_back(term);
            acc += pmf_at(k) * term;
        }
        for (std::size_t k = kmax + 1; k < power.size(); ++k) power[k].push_back(0.0);
        return out + acc;
    }

    double push_geometric() {
        const std::size_t e = h.size() - 1;
        // g (2 - h) = 1 with h_0 = 0.
        const double conv = e == 0 ? 0.0 : simd::convolve_at(h, g, 1, e, e);
        const double ge = 0.5 * ((e == 0 ? 1.0 : 0.0) + conv);
        g.push_back(ge);
        return ge;
    }

    double push_stable(double he) {
        const std::size_t e = h.size() - 1;
        u.push_back(e == 0 ? 1.0 - he : -he);
        iu.push_back(static_cast<double>(e) * u.back());
        double ve = 1.0;
        if (e > 0) {
            const double ed = static_cast<double>(e);
            const double a = simd::convolve_at(iu, v, 1, e, e);
            const double b = simd::convolve_at(u, v, 1, e, e);
            ve = ((beta + 1.0) * a - ed * b) / ed;
        }
        v.push_back(ve);
        return he + c * ve;
    }
};

OnlineComposer::OnlineComposer(const OffspringLaw& law) : impl_(std::make_unique<Impl>(law)) {
    auto& m = *impl_;
    const auto support = law.support_max();
    if (law.family() == Family::geometric) {
        m.method = Method::geometric;
    } else if (law.family() == Family::stable && !support) {
        m.method = Method::stable;
        m.beta = 1.0 + law.alpha();
        m.c = law.parameter();
    } else {
        m.method = Method::powers;
        m.p0 = law.pmf(0);
        if (support) {
            m.pmf.resize(*support + 1);
            for (std::size_t k = 0; k <= *support; ++k) m.pmf[k] = law.pmf(k);
        } else {
            m.unbounded = true;
            m.pmf = {law.pmf(0)};
        }
        m.power.resize(2);
    }
}

OnlineComposer::~OnlineComposer() = default;
OnlineComposer::OnlineComposer(OnlineComposer&&) noexcept = default;
OnlineComposer& OnlineComposer::operator=(OnlineComposer&&) noexcept = default;

std::size_t OnlineComposer::size() const { return impl_->h.size(); }

double OnlineComposer::push(double h_e) {
    auto& m = *impl_;
    if (m.h.empty() && h_e != 0.0) throw std::invalid_argument("OnlineComposer: need h(0) = 0");
    m.h.push_back(h_e);
    switch (m.method) {
        case Method::powers: return m.push_powers(h_e);
        case Method::geometric: return m.push_geometric();
        case Method::stable: return m.push_stable(h_e);
    }
    return 0.0;
}

std::vector<double> compose(const OffspringLaw& law, const std::vector<double>& h,
                            std::size_t degree_cap) {
    OnlineComposer composer(law);
    std::vector<double> out(degree_cap + 1);
    for (std::size_t e = 0; e <= degree_cap; ++e) out[e] = composer.push(e < h.size() ? h[e] : 0.0);
    return out;
}

}  // namespace gw
