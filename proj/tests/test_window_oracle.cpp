#include <doctest.h>

#include "gw/exact_engine.hpp"

using gw::OffspringLaw;

namespace {

void check_contains(const gw::ProbabilityInterval& iv, double value, double tol = 1e-12) {
    CHECK(iv.lo <= value + tol);
    CHECK(iv.hi >= value - tol);
}

}  // namespace

TEST_SUITE("window_oracle") {
    TEST_CASE("small binary cases") {
        const auto bin = OffspringLaw::binary();
        check_contains(gw::window_tail_bruteforce(bin, 1, 2), 0.5);
        check_contains(gw::window_tail_bruteforce(bin, 2, 3), 0.5);
        for (std::size_t j : {1u, 2u, 5u}) {
            const auto iv = gw::window_tail_bruteforce(bin, j, 1);
            CHECK(iv.lo == doctest::Approx(1.0));
        }
    }

    TEST_CASE("single-generation window of the binary law equals P(max Z >= 2)") {
        // Z_1 = 2 with probability 1/2; otherwise the process is extinct.
        const auto iv = gw::window_tail_bruteforce(OffspringLaw::binary(), 1, 2);
        CHECK(iv.hi - iv.lo < 1e-9);
        CHECK(iv.lo == doctest::Approx(0.5).epsilon(1e-9));
    }

    TEST_CASE("intervals are ordered and monotone in the threshold and the window") {
        for (const auto& law : {OffspringLaw::binary(), OffspringLaw::geometric()}) {
            INFO(law.name());
            double prev_hi = 1.0;
            for (std::size_t n : {2u, 4u, 8u, 16u}) {
                const auto iv = gw::window_tail_bruteforce(law, 2, n);
                CHECK(iv.lo <= iv.hi);
                CHECK(iv.lo >= 0.0);
                CHECK(iv.hi <= 1.0);
                CHECK(iv.lo <= prev_hi + 1e-12);
                prev_hi = iv.hi;
            }
            const auto j1 = gw::window_tail_bruteforce(law, 1, 8);
            const auto j3 = gw::window_tail_bruteforce(law, 3, 8);
            CHECK(j1.lo <= j3.hi + 1e-12);
        }
    }

    TEST_CASE("tight budgets widen the interval instead of failing") {
        gw::WindowTailBudget tiny;
        tiny.max_generations = 3;
        const auto iv = gw::window_tail_bruteforce(OffspringLaw::geometric(), 2, 20, tiny);
        const auto full = gw::window_tail_bruteforce(OffspringLaw::geometric(), 2, 20);
        CHECK(iv.generations <= 3);
        CHECK(iv.lo <= full.lo + 1e-12);
        CHECK(iv.hi >= full.hi - 1e-12);
    }
}
