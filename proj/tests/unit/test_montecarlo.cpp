#include <cmath>

#include "doctest.h"
#include "kmsec/errors.hpp"
#include "kmsec/montecarlo.hpp"

using namespace kmsec;
using namespace kmsec::montecarlo;
using secrecy::WiretapPair;

namespace {
const WiretapPair kPair{{2.0, 1.5, 2.0}, {1.0, 0.8, 1.0}, 0.5};
}

TEST_SUITE("montecarlo") {
    TEST_CASE("same seed gives the same estimate; different seeds differ") {
        const auto a = mc_joint(kPair, 200000, 17, 1);
        const auto b = mc_joint(kPair, 200000, 17, 1);
        CHECK(a.spsc.estimate == b.spsc.estimate);
        CHECK(a.sop.estimate == b.sop.estimate);
        CHECK(a.sop_lower.estimate == b.sop_lower.estimate);
        CHECK(a.spsc.seed == 17);
        CHECK(a.spsc.n == 200000);
        const auto c = mc_joint(kPair, 200000, 18, 1);
        CHECK(a.spsc.estimate != c.spsc.estimate);
    }

    TEST_CASE("result does not depend on the thread count") {
        // Not a multiple of the block size, so the short last block is covered too.
        const std::size_t n = 5 * kBlockSize + 123;
        const auto one = mc_joint(kPair, n, 5, 1);
        const auto three = mc_joint(kPair, n, 5, 3);
        CHECK(one.spsc.estimate == three.spsc.estimate);
        CHECK(one.sop.estimate == three.sop.estimate);
        CHECK(one.sop_lower.estimate == three.sop_lower.estimate);
        CHECK(one.diff_std_error == three.diff_std_error);
    }

    TEST_CASE("single-metric helpers agree with the joint run") {
        const auto joint = mc_joint(kPair, 100000, 9, 2);
        CHECK(mc_spsc(kPair, 100000, 9, 1).estimate == joint.spsc.estimate);
        CHECK(mc_sop(kPair, 100000, 9, false, 1).estimate == joint.sop.estimate);
        CHECK(mc_sop(kPair, 100000, 9, true, 1).estimate == joint.sop_lower.estimate);
    }

    TEST_CASE("lower-bound event is contained in the outage event") {
        for (double rate : {0.0, 0.5, 2.0}) {
            WiretapPair p = kPair;
            p.rate = rate;
            const auto j = mc_joint(p, 300000, 3, 1);
            CHECK(j.inclusion_violations == 0);
            CHECK(j.sop_lower.estimate <= j.sop.estimate);
        }
    }

    TEST_CASE("spsc and sop_lower are complementary at rate zero") {
        WiretapPair p = kPair;
        p.rate = 0.0;
        const auto j = mc_joint(p, 100000, 4, 1);
        CHECK(j.spsc.estimate + j.sop_lower.estimate == doctest::Approx(1.0).epsilon(1e-12));
    }

    TEST_CASE("standard error halves when n is quadrupled") {
        const auto a = mc_spsc(kPair, 250000, 1, 1);
        const auto b = mc_spsc(kPair, 1000000, 1, 1);
        CHECK(b.std_error / a.std_error == doctest::Approx(0.5).epsilon(0.05));
    }

    TEST_CASE("make_estimate") {
        const auto e = make_estimate(250, 1000, 3);
        CHECK(e.estimate == 0.25);
        CHECK(e.std_error == doctest::Approx(std::sqrt(0.25 * 0.75 / 1000.0)).epsilon(1e-15));
        CHECK(make_estimate(0, 1000, 3).std_error == 0.0);
    }

    TEST_CASE("too few draws or bad parameters are rejected") {
        CHECK_THROWS_AS(mc_joint(kPair, kMinDraws - 1, 1), DomainError);
        CHECK_THROWS_AS(mc_spsc({{1.0, -1.0, 1.0}, {1.0, 1.0, 1.0}, 0.0}, 10000, 1), DomainError);
    }
}
