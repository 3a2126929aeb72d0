#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/special_functions/zeta.hpp>

#include <cmath>
#include <vector>

#include "gw/law_json.hpp"
#include "gw/offspring_law.hpp"

using gw::OffspringLaw;

namespace {

// |binom(beta, k)| for 1 < beta < 2 and k >= 2 through the gamma function,
// independent of the multiplicative recurrence used by the library.
double abs_binom_gamma(double beta, unsigned k) {
    return beta * (beta - 1.0) *
           std::exp(std::lgamma(k - beta) - std::lgamma(2.0 - beta) - std::lgamma(k + 1.0));
}

std::vector<OffspringLaw> certified_laws() {
    return {OffspringLaw::binary(), OffspringLaw::geometric(), OffspringLaw::stable(0.5, 0.5),
            OffspringLaw::stable(1.0, 0.5), OffspringLaw::zipf(0.5)};
}

bool has_check(const gw::LawReport& r, const std::string& name, gw::LawCheck::Status status) {
    for (const auto& c : r.checks)
        if (c.name == name && c.status == status) return true;
    return false;
}

}  // namespace

TEST_SUITE("offspring_law") {
    TEST_CASE("binary pmf and generating function") {
        const auto law = OffspringLaw::binary();
        CHECK(law.pmf(0) == 0.5);
        CHECK(law.pmf(1) == 0.0);
        CHECK(law.pmf(2) == 0.5);
        CHECK(law.pmf(3) == 0.0);
        CHECK(law.pgf(0.5) == doctest::Approx(0.625));
        CHECK(law.slowly_varying_L(0.3) == doctest::Approx(0.5));
        CHECK(law.alpha() == 1.0);
        CHECK(law.is_binary());
        CHECK(law.support_max().value() == 2);
        CHECK(law.factorial_variance().value() == doctest::Approx(1.0));
        CHECK(law.truncated_variance(1) == 0.0);
        CHECK(law.truncated_variance(2) == doctest::Approx(1.0));
    }

    TEST_CASE("geometric pmf, generating function and L") {
        const auto law = OffspringLaw::geometric();
        for (unsigned k = 0; k < 60; ++k) CHECK(law.pmf(k) == doctest::Approx(std::ldexp(1.0, -static_cast<int>(k) - 1)));
        CHECK(law.tail_prob(3) == doctest::Approx(1.0 / 16));
        CHECK(law.pgf(0.5) == doctest::Approx(2.0 / 3));
        for (double x : {1e-6, 0.1, 0.5, 1.0}) CHECK(law.slowly_varying_L(x) == doctest::Approx(1.0 / (1.0 + x)));
        CHECK(law.factorial_variance().value() == doctest::Approx(2.0));
        CHECK_FALSE(law.is_binary());
        CHECK_FALSE(law.support_max().has_value());
    }

    TEST_CASE("stable law coefficients match the gamma-function form") {
        for (double alpha : {0.3, 0.5, 0.8}) {
            const double c = 1.0 / (1.0 + alpha);
            const auto law = OffspringLaw::stable(alpha, c);
            CHECK(law.pmf(0) == doctest::Approx(c));
            CHECK(law.pmf(1) == doctest::Approx(1.0 - c * (1.0 + alpha)).epsilon(1e-12));
            for (unsigned k : {2u, 3u, 10u, 100u, 1000u, 1023u, 1024u, 1025u, 5000u, 100000u})
                CHECK(law.pmf(k) == doctest::Approx(c * abs_binom_gamma(1.0 + alpha, k)).epsilon(1e-10));
            CHECK(law.slowly_varying_L(0.25) == doctest::Approx(c));
            CHECK_FALSE(law.factorial_variance().has_value());
            for (double s : {0.0, 0.2, 0.9, 0.999})
                CHECK(law.pgf(s) == doctest::Approx(s + c * std::pow(1.0 - s, 1.0 + alpha)).epsilon(1e-12));
        }
    }

    TEST_CASE("stable law tails are consistent with the pmf") {
        const auto law = OffspringLaw::stable(0.5, 0.5);
        double tail = law.tail_prob(2000);
        for (unsigned k = 2000; k > 1500; --k) tail += law.pmf(k);
        CHECK(law.tail_prob(1500) == doctest::Approx(tail).epsilon(1e-9));
    }

    TEST_CASE("stable alpha = 1 with c = 1/2 is the binary law") {
        const auto law = OffspringLaw::stable(1.0, 0.5);
        CHECK(law.is_binary());
        CHECK(law.pmf(2) == doctest::Approx(0.5));
    }

    TEST_CASE("stable parameter range is enforced") {
        CHECK_THROWS_AS(OffspringLaw::stable(0.5, 0.8), std::invalid_argument);
        CHECK_THROWS_AS(OffspringLaw::stable(0.0, 0.5), std::invalid_argument);
        CHECK_THROWS_AS(OffspringLaw::stable(1.2, 0.3), std::invalid_argument);
        CHECK_THROWS_AS(OffspringLaw::stable(0.5, 0.0), std::invalid_argument);
    }

    TEST_CASE("zipf probabilities against the Riemann zeta function") {
        for (double alpha : {0.5, 0.9}) {
            const double z1 = boost::math::zeta(1.0 + alpha) - 1.0;
            const double z2 = boost::math::zeta(2.0 + alpha) - 1.0;
            const double w = 1.0 / z1;
            const auto law = OffspringLaw::zipf(alpha);
            CHECK(law.parameter() == doctest::Approx(w));
            CHECK(std::fabs(law.pmf(1)) < 1e-12);
            CHECK(law.pmf(0) == doctest::Approx(1.0 - w * z2).epsilon(1e-12));
            for (unsigned k : {2u, 7u, 2048u, 2049u, 100000u})
                CHECK(law.pmf(k) == doctest::Approx(w * std::pow(k, -(2.0 + alpha))).epsilon(1e-12));

            const double w2 = 0.5 * w;
            const auto half = OffspringLaw::zipf(alpha, w2);
            CHECK(half.pmf(1) == doctest::Approx(1.0 - w2 * z1).epsilon(1e-12));
            CHECK(half.pmf(0) == doctest::Approx(w2 * (z1 - z2)).epsilon(1e-12));
        }
        CHECK_THROWS_AS(OffspringLaw::zipf(0.5, 10.0), std::invalid_argument);
    }

    TEST_CASE("mass and mean are one for every certified law") {
        for (const auto& law : certified_laws()) {
            INFO(law.name());
            CHECK(law.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(law.mean() == doctest::Approx(1.0).epsilon(1e-10));
            CHECK(law.pgf(1.0) == doctest::Approx(1.0));
            CHECK(law.pgf_derivative(1.0) == doctest::Approx(1.0).epsilon(1e-9));
        }
    }

    TEST_CASE("generating function agrees with its power series") {
        for (const auto& law : certified_laws()) {
            INFO(law.name());
            for (double s : {0.0, 0.1, 0.5, 0.8}) {
                double series = 0.0;
                double sk = 1.0;
                for (unsigned k = 0; k < 400; ++k, sk *= s) series += law.pmf(k) * sk;
                CHECK(law.pgf(s) == doctest::Approx(series).epsilon(1e-12));
            }
        }
    }

    TEST_CASE("derivative agrees with central differences") {
        for (const auto& law : certified_laws()) {
            INFO(law.name());
            for (double s : {0.1, 0.5, 0.9}) {
                const double h = 1e-5;
                const double fd = (law.pgf(s + h) - law.pgf(s - h)) / (2 * h);
                CHECK(law.pgf_derivative(s) == doctest::Approx(fd).epsilon(1e-7));
            }
        }
    }

    TEST_CASE("complement forms match direct evaluation away from the boundary") {
        for (const auto& law : certified_laws()) {
            INFO(law.name());
            for (double x : {0.01, 0.2, 0.7, 1.0}) {
                CHECK(law.complement(x) == doctest::Approx(1.0 - law.pgf(1.0 - x)).epsilon(1e-12));
                CHECK(law.derivative_complement(x) == doctest::Approx(1.0 - law.pgf_derivative(1.0 - x)).epsilon(1e-10));
                CHECK(law.gap(x) == doctest::Approx(law.pgf(1.0 - x) - (1.0 - x)).epsilon(1e-10));
            }
            // Small arguments keep full relative precision: gap(x) = x^{1+a} L(x).
            const double x = 1e-9;
            CHECK(law.gap(x) > 0.0);
            CHECK(law.complement(x) == doctest::Approx(x - law.gap(x)).epsilon(1e-14));
        }
    }

    TEST_CASE("pgf rejects arguments outside the unit interval") {
        const auto law = OffspringLaw::geometric();
        CHECK_THROWS_AS(law.pgf(-0.1), std::domain_error);
        CHECK_THROWS_AS(law.pgf(1.1), std::domain_error);
        CHECK_THROWS(law.slowly_varying_L(0.0));
    }

    TEST_CASE("truncated variance is monotone and bounded by R") {
        for (const auto& law : certified_laws()) {
            INFO(law.name());
            double prev = -1.0;
            for (std::uint64_t R : {0u, 1u, 2u, 5u, 50u, 1000u, 5000u}) {
                const double b = law.truncated_variance(R);
                CHECK(b >= prev);
                // E xi(xi - 1); xi <= R is at most (R - 1) E xi.
                CHECK(b <= std::max<double>(0.0, static_cast<double>(R) - 1.0) + 1e-12);
                prev = b;
            }
        }
    }

    TEST_CASE("sampler passes a chi-square goodness of fit test") {
        for (const auto& law : certified_laws()) {
            INFO(law.name());
            gw::RngStream rng(2024, 1);
            const int n = 200000;
            const unsigned bins = 30;  // 0..bins-1 plus an overflow bin
            std::vector<double> counts(bins + 1, 0.0);
            for (int i = 0; i < n; ++i) {
                const auto k = law.sample(rng);
                counts[std::min<std::uint64_t>(k, bins)] += 1.0;
            }
            double chi2 = 0.0;
            int dof = -1;
            double pooled_obs = 0.0, pooled_exp = 0.0;
            for (unsigned k = 0; k <= bins; ++k) {
                const double p = k < bins ? law.pmf(k) : law.tail_prob(bins - 1);
                pooled_obs += counts[k];
                pooled_exp += n * p;
                if (pooled_exp >= 20.0 || k == bins) {
                    if (pooled_exp > 0.0) {
                        chi2 += (pooled_obs - pooled_exp) * (pooled_obs - pooled_exp) / pooled_exp;
                        ++dof;
                    } else {
                        CHECK(pooled_obs == 0.0);
                    }
                    pooled_obs = pooled_exp = 0.0;
                }
            }
            REQUIRE(dof >= 1);
            const double crit = boost::math::quantile(boost::math::chi_squared(dof), 0.999);
            CHECK(chi2 < crit);
        }
    }

    TEST_CASE("heavy-tailed sampler reaches the far tail at the right rate") {
        const auto law = OffspringLaw::stable(0.5, 0.5);
        gw::RngStream rng(7, 3);
        const int n = 400000;
        const std::uint64_t k = 10000;
        int hits = 0;
        for (int i = 0; i < n; ++i) hits += law.sample(rng) > k;
        const double p = law.tail_prob(k);
        const double sd = std::sqrt(n * p * (1 - p));
        CHECK(std::fabs(hits - n * p) < 4 * sd);
    }

    TEST_CASE("validation passes certified laws and flags defects") {
        for (const auto& law : certified_laws()) {
            INFO(law.name());
            CHECK(gw::validate(law).ok());
        }
        using S = gw::LawCheck::Status;
        CHECK(has_check(gw::validate(OffspringLaw::zipf(0.5)), "index_certificate", S::asymptotic_only));
        CHECK(has_check(gw::validate(OffspringLaw::binary()), "index_certificate", S::pass));

        const auto supercritical = gw::validate(OffspringLaw::finite({0.3, 0.3, 0.4}));
        CHECK_FALSE(supercritical.ok());
        CHECK(has_check(supercritical, "criticality", S::fail));

        const auto unnormalized = gw::validate(OffspringLaw::finite({0.4, 0.2, 0.4, 0.1}));
        CHECK(has_check(unnormalized, "normalization", S::fail));

        const auto negative = gw::validate(OffspringLaw::finite({0.6, -0.2, 0.6}));
        CHECK(has_check(negative, "nonnegative_pmf", S::fail));

        const auto binary_like = OffspringLaw::finite({0.5, 0.0, 0.5});
        CHECK(gw::validate(binary_like).ok());
        CHECK(binary_like.is_binary());
    }

    TEST_CASE("JSON specs round trip and report errors") {
        for (const auto& law : certified_laws()) {
            const auto back = gw::law_from_json(gw::law_to_json(law));
            CHECK(back.family() == law.family());
            CHECK(back.alpha() == law.alpha());
            CHECK(back.parameter() == law.parameter());
            CHECK(back.pmf(3) == law.pmf(3));
        }
        CHECK(gw::parse_law_spec(R"({"family":"BIN"})").is_binary());
        CHECK(gw::parse_law_spec(R"({"family":"GEO"})").family() == gw::Family::geometric);
        CHECK(gw::parse_law_spec(R"({"family":"stable","alpha":0.5,"params":{"c":0.5}})").parameter() == 0.5);
        CHECK_THROWS_AS(gw::parse_law_spec("{not json"), gw::LawSpecError);
        CHECK_THROWS_AS(gw::parse_law_spec(R"({"family":"poisson"})"), gw::LawSpecError);
        CHECK_THROWS_AS(gw::parse_law_spec(R"({"family":"stable","alpha":0.5})"), gw::LawSpecError);
        CHECK_THROWS_AS(gw::parse_law_spec(R"({"family":"stable","alpha":0.5,"params":{"c":0.9}})"), gw::LawSpecError);
        CHECK_THROWS_AS(gw::parse_law_spec(R"({"family":"binary","alpha":0.5})"), gw::LawSpecError);
        CHECK_THROWS_AS(gw::parse_law_spec("/nonexistent/law.json"), gw::LawSpecError);
    }
}

TEST_SUITE("offspring_law") {
    TEST_CASE("worked values") {
        const auto st = OffspringLaw::stable(0.5, 2.0 / 3.0);
        CHECK(st.pmf(0) == doctest::Approx(2.0 / 3.0));
        CHECK(std::fabs(st.pmf(1)) < 1e-15);
        CHECK(st.pmf(2) == doctest::Approx(0.25));
        CHECK(st.pgf(0.0) == doctest::Approx(2.0 / 3.0));

        const auto bin = OffspringLaw::binary();
        CHECK(bin.pgf(0.5) == 0.625);
        CHECK(bin.pgf_derivative(0.5) == 0.5);
        for (double x : {1e-9, 0.01, 0.5, 1.0}) CHECK(bin.slowly_varying_L(x) == doctest::Approx(0.5));

        const auto geo = OffspringLaw::geometric();
        CHECK(geo.pmf(3) == 0.0625);
        CHECK(geo.slowly_varying_L(0.5) == doctest::Approx(2.0 / 3.0));
        CHECK(geo.truncated_variance(2) == doctest::Approx(0.25));

        for (double x : {0.01, 0.3}) CHECK(st.slowly_varying_L(x) == doctest::Approx(2.0 / 3.0));
        for (const auto& law : certified_laws()) {
            CHECK(law.pgf(1.0) == doctest::Approx(1.0));
            CHECK(law.truncated_variance(1) == 0.0);
        }
        for (std::uint64_t R : {2u, 3u, 100u}) CHECK(bin.truncated_variance(R) == doctest::Approx(1.0));
    }

    TEST_CASE("a million draws have mean one") {
        for (const auto& law : {OffspringLaw::binary(), OffspringLaw::geometric()}) {
            INFO(law.name());
            gw::RngStream rng(31, 0);
            const int n = 1000000;
            double sum = 0.0;
            for (int i = 0; i < n; ++i) sum += static_cast<double>(law.sample(rng));
            const double sd = std::sqrt(law.factorial_variance().value());  // variance = E xi(xi-1) at mean 1
            CHECK(std::fabs(sum / n - 1.0) <= 4.0 * sd / 1000.0);
        }
        const auto st = OffspringLaw::stable(0.5, 2.0 / 3.0);
        gw::RngStream rng(32, 0);
        const int n = 1000000;
        int zeros = 0;
        for (int i = 0; i < n; ++i) zeros += st.sample(rng) == 0;
        CHECK(std::fabs(static_cast<double>(zeros) / n - 2.0 / 3.0) <= 0.002);
    }

    TEST_CASE("binary derivative ratio is exactly one and a short pmf fails normalization") {
        const auto r = gw::validate(OffspringLaw::binary());
        for (const auto& c : r.checks)
            if (c.name == "derivative_asymptotics") CHECK(c.residual <= 1e-15);
        const auto short_mass = gw::validate(OffspringLaw::finite({0.505, 0.0, 0.485}));
        CHECK(has_check(short_mass, "normalization", gw::LawCheck::Status::fail));
        const auto zipf = gw::validate(OffspringLaw::zipf(0.5));
        CHECK(has_check(zipf, "criticality", gw::LawCheck::Status::pass));
    }
}
