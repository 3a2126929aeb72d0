#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "gw/exact_engine.hpp"

using gw::OffspringLaw;

namespace {

// Geometric law: the tree is a uniform plane tree, so
// P(S = n) = Catalan(n - 1) / 2^{2n - 1}.
double geometric_progeny(std::size_t n) {
    const double m = static_cast<double>(n - 1);
    const double log_catalan = std::lgamma(2 * m + 1) - std::lgamma(m + 1) - std::lgamma(m + 2);
    return std::exp(log_catalan - (2.0 * n - 1.0) * std::log(2.0));
}

}  // namespace

TEST_SUITE("exact_engine") {
    TEST_CASE("binary extinction iterates") {
        const auto t = gw::full_iterate_table(OffspringLaw::binary(), 4);
        CHECK(t.Q_values[0] == 1.0);
        CHECK(t.Q_values[1] == 0.5);
        CHECK(t.Q_values[2] == 0.375);
        CHECK(t.f0_values[2] == 0.625);
        CHECK(t.d_values[0] == 1.0);
        CHECK(t.d_values[1] == 1.0);
        CHECK(t.d_values[2] == 0.5);
        CHECK(t.a_values[0] == 0.0);
        CHECK(t.a_values[1] == 0.5);
        CHECK(t.a_values[2] == 0.875);
    }

    TEST_CASE("geometric iterates have closed forms") {
        const std::size_t n = 2000;
        const auto t = gw::full_iterate_table(OffspringLaw::geometric(), n);
        for (std::size_t k = 1; k <= n; k += 37) {
            CHECK(t.Q_values[k] == doctest::Approx(1.0 / (k + 1)).epsilon(1e-13));
            CHECK(t.d_values[k] == doctest::Approx(4.0 / ((k + 1.0) * (k + 1.0))).epsilon(1e-12));
        }
    }

    TEST_CASE("binary Q(n) ~ 2/n") {
        const auto t = gw::iterate_extinction(OffspringLaw::binary(), 100000);
        CHECK(100000 * t.Q_values[100000] == doctest::Approx(2.0).epsilon(1e-3));
    }

    TEST_CASE("iterate sequences are monotone and bounded") {
        for (const auto& law : {OffspringLaw::binary(), OffspringLaw::geometric(), OffspringLaw::stable(0.5, 0.5),
                                OffspringLaw::zipf(0.5)}) {
            INFO(law.name());
            const std::size_t n = 300;
            const auto t = gw::full_iterate_table(law, n);
            for (std::size_t k = 1; k <= n; ++k) {
                CHECK(t.Q_values[k] <= t.Q_values[k - 1]);
                CHECK(t.Q_values[k] + t.f0_values[k] == doctest::Approx(1.0));
                CHECK(t.d_values[k] <= t.d_values[k - 1] + 1e-15);
                CHECK(t.a_values[k] >= t.a_values[k - 1]);
                CHECK(t.a_values[k] <= static_cast<double>(k) + 1e-12);
            }
            CHECK(gw::d_product(law, n) == t.d_values);
            CHECK(gw::restricted_mean_a(law, n) == t.a_values);
        }
    }

    TEST_CASE("total progeny matches closed forms and the Dwass formula") {
        const std::size_t n_max = 400;
        const auto bin = gw::total_progeny_pmf(OffspringLaw::binary(), n_max);
        for (std::size_t n = 1; n <= n_max; ++n)
            CHECK(bin[n] == doctest::Approx(gw::binary_total_progeny_pmf(n)).epsilon(1e-12).scale(1e-300));
        CHECK(bin[0] == 0.0);
        CHECK(bin[1] == 0.5);
        CHECK(bin[3] == 0.125);
        CHECK(bin.sum() + bin.residual_mass == doctest::Approx(1.0).epsilon(1e-12));

        const auto geo = gw::total_progeny_pmf(OffspringLaw::geometric(), n_max);
        for (std::size_t n = 1; n <= n_max; n += 7) CHECK(geo[n] == doctest::Approx(geometric_progeny(n)).epsilon(1e-11));

        for (const auto& law : {OffspringLaw::stable(0.5, 0.5), OffspringLaw::zipf(0.5), OffspringLaw::geometric()}) {
            INFO(law.name());
            const auto series = gw::total_progeny_pmf(law, 200);
            const auto batch = gw::dwass_oracle_batch(law, 200);
            for (std::size_t n = 1; n <= 200; ++n) CHECK(series[n] == doctest::Approx(batch[n]).epsilon(1e-10).scale(1e-300));
            for (std::size_t n : {1u, 2u, 17u, 200u}) CHECK(gw::dwass_oracle(law, n) == doctest::Approx(batch[n]).epsilon(1e-10));
            CHECK(series.residual_mass == doctest::Approx(1.0 - series.sum()).epsilon(1e-12));
        }
        CHECK_THROWS_AS(gw::dwass_oracle(OffspringLaw::binary(), gw::kDwassBudget + 1), std::length_error);
    }

    TEST_CASE("binary progeny tail") {
        CHECK(gw::binary_total_progeny_tail(1) == 1.0);
        CHECK(gw::binary_total_progeny_tail(2) == 0.5);
        CHECK(gw::binary_total_progeny_tail(3) == 0.5);
        CHECK(gw::binary_total_progeny_tail(5) == doctest::Approx(0.375));
        double tail = 1.0;
        for (std::uint64_t n = 1; n < 300; ++n) {
            CHECK(gw::binary_total_progeny_tail(n) == doctest::Approx(tail).epsilon(1e-12));
            tail -= gw::binary_total_progeny_pmf(n);
        }
        // C(2r, r) / 4^r ~ 1 / sqrt(pi r).
        CHECK(gw::binary_total_progeny_tail(2000000) * std::sqrt(std::numbers::pi * 1e6) == doctest::Approx(1.0).epsilon(1e-6));
    }

    TEST_CASE("bivariate generating function") {
        const auto bin = OffspringLaw::binary();
        const std::size_t j = 5;
        const auto h = gw::bivariate_hj(bin, j, 100);
        const auto t = gw::full_iterate_table(bin, j);
        CHECK(h.sum() + h.residual_mass == doctest::Approx(t.f0_values[j]).epsilon(1e-14));
        double mean = 0.0;
        for (std::size_t k = 0; k < h.coeffs.size(); ++k) mean += k * h.coeffs[k];
        CHECK(mean == doctest::Approx(t.a_values[j]).epsilon(1e-13));

        // Trees with at most j vertices die out by generation j.
        const std::size_t jj = 50;
        const auto hb = gw::bivariate_hj(bin, jj, jj);
        const auto dw = gw::dwass_oracle_batch(bin, jj);
        for (std::size_t n = 1; n <= jj; ++n) CHECK(hb[n] == doctest::Approx(dw[n]).epsilon(1e-12).scale(1e-300));

        const auto geo = OffspringLaw::geometric();
        const auto hg = gw::bivariate_hj(geo, 12, 60);
        CHECK(hg.sum() + hg.residual_mass == doctest::Approx(12.0 / 13.0).epsilon(1e-13));
    }

    TEST_CASE("slack root of the extinction asymptote") {
        for (double n : {10.0, 100.0, 1e4}) {
            CHECK(gw::slack_Q_asymptote(OffspringLaw::binary(), n) == doctest::Approx(2.0 / n).epsilon(1e-10));
            CHECK(gw::slack_Q_asymptote(OffspringLaw::geometric(), n) == doctest::Approx(1.0 / (n - 1)).epsilon(1e-10));
            CHECK(gw::slack_Q_asymptote(OffspringLaw::stable(0.5, 2.0 / 3.0), n) == doctest::Approx(9.0 / (n * n)).epsilon(1e-9));
        }
        CHECK_THROWS_AS(gw::slack_Q_asymptote(OffspringLaw::binary(), 2.0), std::domain_error);
    }

    TEST_CASE("tail constants") {
        const auto c = gw::tail_constants(1.0, 1.0);
        CHECK(c.term2_constant == doctest::Approx(1.0 / std::sqrt(std::numbers::pi)));
        CHECK(c.cor22_constant == doctest::Approx(1.0 / std::sqrt(std::numbers::pi)));
        const auto d = gw::tail_constants(0.5, 2.0);
        CHECK(d.term2_constant == doctest::Approx(1.0 / std::tgamma(1.0 / 3.0)));
        CHECK(d.cor22_constant == doctest::Approx(std::pow(0.5, 2.0 / 3.0) / std::tgamma(1.0 / 3.0)));
    }
}

TEST_SUITE("exact_engine") {
    TEST_CASE("worked values") {
        for (const auto& law : {OffspringLaw::binary(), OffspringLaw::geometric(), OffspringLaw::stable(0.5, 0.5)}) {
            const auto t = gw::full_iterate_table(law, 2);
            CHECK(t.Q_values[0] == 1.0);
            CHECK(t.d_values[1] == 1.0);
            CHECK(gw::total_progeny_pmf(law, 3)[1] == doctest::Approx(law.pmf(0)));
            CHECK(gw::dwass_oracle(law, 1) == doctest::Approx(law.pmf(0)));
            const auto h = gw::bivariate_hj(law, 4, 40);
            CHECK(h.sum() + h.residual_mass == doctest::Approx(gw::iterate_extinction(law, 4).f0_values[4]).epsilon(1e-13));
        }
        const auto bin = OffspringLaw::binary();
        CHECK(gw::dwass_oracle(bin, 3) == doctest::Approx(0.125));
        CHECK(gw::dwass_oracle(bin, 2) == 0.0);
        const auto pmf = gw::total_progeny_pmf(bin, 3);
        CHECK(pmf[2] == 0.0);
        CHECK(gw::total_progeny_pmf(OffspringLaw::geometric(), 2)[2] == doctest::Approx(0.125));
        CHECK(gw::dwass_oracle(OffspringLaw::geometric(), 2) == doctest::Approx(0.125));

        const auto h1 = gw::bivariate_hj(bin, 1, 5);
        CHECK(h1[0] == 0.0);
        CHECK(h1[1] == doctest::Approx(0.5));
        for (std::size_t k = 2; k <= 5; ++k) CHECK(h1[k] == 0.0);

        CHECK(gw::tail_constants(1.0, 4.0).term2_constant == doctest::Approx(2.0 / std::sqrt(std::numbers::pi)));
        CHECK(gw::slack_Q_asymptote(OffspringLaw::geometric(), 100.0) == doctest::Approx(0.010101).epsilon(1e-5));
    }

    TEST_CASE("geometric Q(n) = 1/(n+1) for every n up to 10^4") {
        const auto t = gw::iterate_extinction(OffspringLaw::geometric(), 10000);
        double worst = 0.0;
        for (std::size_t n = 0; n <= 10000; ++n) worst = std::max(worst, std::fabs(t.Q_values[n] * (n + 1.0) - 1.0));
        CHECK(worst < 1e-12);
    }

    TEST_CASE("binary a_j / j approaches 1/3") {
        const auto a = gw::restricted_mean_a(OffspringLaw::binary(), 100000);
        CHECK(std::fabs(a[100000] / 1e5 - 1.0 / 3.0) <= 0.02);
    }

    TEST_CASE("binary d_n is regularly varying with index -2") {
        const auto d = gw::d_product(OffspringLaw::binary(), 20000);
        for (std::size_t n : {1000u, 10000u}) {
            const double ratio = d[2 * n] * (2.0 * n) * (2.0 * n) / (d[n] * n * static_cast<double>(n));
            CHECK(ratio >= 0.95);
            CHECK(ratio <= 1.05);
        }
    }
}
