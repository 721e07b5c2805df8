#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "helpers.hpp"
#include "sdcexp/probability.hpp"
#include "sdcexp/verify.hpp"

using namespace sdcexp;

namespace {
const std::vector<int> kU_{kAxisU};
const std::vector<int> kY_{kAxisY};
const std::vector<int> kS_{kAxisS};
const std::vector<int> kSY{kAxisS, kAxisY};
const std::vector<int> kXS{kAxisS, kAxisX};
const std::vector<int> kUVSX{kAxisU, kAxisV, kAxisS, kAxisX};
}  // namespace

TEST_CASE("dist and joint invariants are enforced") {
    CHECK_THROWS_AS(Dist({0.5, 0.6}), std::invalid_argument);
    CHECK_THROWS_AS(Dist({1.2, -0.2}), std::invalid_argument);
    CHECK_NOTHROW(Dist({0.3, 0.7}));
    CHECK_THROWS_AS(Joint5(Shape5(1, 1, 1, 1, 2), {0.5, 0.6}), std::invalid_argument);
}

TEST_CASE("marginal of the uniform joint over 2^5 cells") {
    Shape5 sh(2, 2, 2, 2, 2);
    Joint5 q(sh, std::vector<double>(32, 1.0 / 32));
    Marginal m = marginal(q, kS_);
    REQUIRE(m.p.size() == 2);
    CHECK(m.p[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(m.p[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("marginal of a point mass is degenerate") {
    Shape5 sh(2, 2, 2, 2, 2);
    std::vector<double> mass(32, 0.0);
    mass[sh.index({0, 0, 0, 0, 0})] = 1.0;
    Joint5 q(sh, mass);
    Marginal m = marginal(q, kY_);
    CHECK(m.p[0] == 1.0);
    CHECK(m.p[1] == 0.0);
}

TEST_CASE("marginal matches direct double-loop summation on a seeded joint") {
    Shape5 sh(2, 3, 2, 2, 3);
    Joint5 q = random_interior_joint(sh, 42);
    Marginal m = marginal(q, kSY);
    for (int s = 0; s < 2; ++s)
        for (int y = 0; y < 3; ++y) {
            double direct = 0.0;
            for (int u = 0; u < 2; ++u)
                for (int v = 0; v < 3; ++v)
                    for (int x = 0; x < 2; ++x) direct += q.at(u, v, s, x, y);
            CHECK(m.p[m.index(std::array{s, y})] == doctest::Approx(direct).epsilon(1e-14));
        }
    CHECK(m.sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("marginal rejects an empty axis set") {
    Shape5 sh(2, 2, 2, 2, 2);
    Joint5 q(sh, std::vector<double>(32, 1.0 / 32));
    CHECK_THROWS_AS(marginal(q, std::vector<int>{}), std::invalid_argument);
}

TEST_CASE("conditional of a channel-consistent product recovers the channel") {
    auto [w, p_s] = testutil::load_fixture("bsc01_stateless");
    Joint5 q = Joint5::independent(Dist::uniform(2), Dist::uniform(2), p_s, Dist::uniform(2), w);
    CondTable c = conditional(q, kY_, kXS);
    // given axes in canonical order (S, X)
    for (int s = 0; s < 2; ++s)
        for (int x = 0; x < 2; ++x) {
            std::size_t g = static_cast<std::size_t>(s) * 2 + x;
            REQUIRE(c.defined[g]);
            for (int y = 0; y < 2; ++y)
                CHECK(c.value(g, y) == doctest::Approx(w(s, x, y)).epsilon(1e-12));
        }
}

TEST_CASE("conditional of a point mass is degenerate and zero rows are flagged") {
    Shape5 sh(2, 1, 1, 1, 3);
    std::vector<double> mass(sh.size(), 0.0);
    mass[sh.index({1, 0, 0, 0, 2})] = 1.0;
    Joint5 q(sh, mass);
    CondTable c = conditional(q, kY_, kU_);
    CHECK(!c.defined[0]);
    REQUIRE(c.defined[1]);
    CHECK(c.value(1, 2) == 1.0);
    CHECK(c.value(1, 0) == 0.0);
}

TEST_CASE("conditional matches the integer-ratio oracle on seeded joints") {
    Shape5 sh(2, 2, 2, 2, 2);
    for (std::uint64_t seed : {7u, 8u, 9u}) {
        auto ij = testutil::integer_joint(sh, seed);
        CondTable c = conditional(ij.joint, kY_, kUVSX);
        for (int u = 0; u < 2; ++u)
            for (int v = 0; v < 2; ++v)
                for (int s = 0; s < 2; ++s)
                    for (int x = 0; x < 2; ++x) {
                        long long row = 0;
                        for (int y = 0; y < 2; ++y)
                            row += ij.weights[sh.index({u, v, s, x, y})];
                        std::size_t g = ((static_cast<std::size_t>(u) * 2 + v) * 2 + s) * 2 + x;
                        if (row == 0) {
                            CHECK(!c.defined[g]);
                            continue;
                        }
                        REQUIRE(c.defined[g]);
                        for (int y = 0; y < 2; ++y) {
                            double expect =
                                static_cast<double>(ij.weights[sh.index({u, v, s, x, y})]) /
                                static_cast<double>(row);
                            CHECK(std::abs(c.value(g, y) - expect) < 1e-12);
                        }
                    }
    }
}

TEST_CASE("conditional rejects overlapping axis sets") {
    Shape5 sh(2, 2, 2, 2, 2);
    Joint5 q(sh, std::vector<double>(32, 1.0 / 32));
    CHECK_THROWS_AS(conditional(q, kY_, std::vector<int>{kAxisY}), std::invalid_argument);
}

TEST_CASE("mutual information basics") {
    SUBCASE("independent uniform pair") {
        Shape5 sh(2, 1, 1, 1, 2);
        Joint5 q(sh, std::vector<double>(4, 0.25));
        CHECK(mutual_info(q, kU_, kY_) == doctest::Approx(0.0).epsilon(1e-14));
    }
    SUBCASE("identity coupling gives ln 2") {
        Shape5 sh(2, 1, 1, 1, 2);
        std::vector<double> mass(4, 0.0);
        mass[sh.index({0, 0, 0, 0, 0})] = 0.5;
        mass[sh.index({1, 0, 0, 0, 1})] = 0.5;
        Joint5 q(sh, mass);
        CHECK(mutual_info(q, kU_, kY_) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    }
    SUBCASE("binary symmetric coupling, crossover 0.1") {
        Shape5 sh(1, 1, 1, 2, 2);
        std::vector<double> mass(4);
        mass[sh.index({0, 0, 0, 0, 0})] = 0.45;
        mass[sh.index({0, 0, 0, 0, 1})] = 0.05;
        mass[sh.index({0, 0, 0, 1, 0})] = 0.05;
        mass[sh.index({0, 0, 0, 1, 1})] = 0.45;
        Joint5 q(sh, mass);
        // direct four-cell summation oracle
        double direct = 0.0;
        for (double p : {0.45, 0.05, 0.05, 0.45}) direct += p * std::log(p / (0.5 * 0.5));
        const double h01 = -(0.1 * std::log(0.1) + 0.9 * std::log(0.9));
        CHECK(direct == doctest::Approx(std::log(2.0) - h01).epsilon(1e-12));
        CHECK(mutual_info(q, std::vector<int>{kAxisX}, kY_) ==
              doctest::Approx(direct).epsilon(1e-12));
    }
}

TEST_CASE("mutual information rejects non-disjoint axis sets") {
    Shape5 sh(2, 2, 2, 2, 2);
    Joint5 q(sh, std::vector<double>(32, 1.0 / 32));
    CHECK_THROWS_AS(mutual_info(q, kY_, kY_), std::invalid_argument);
}

TEST_CASE("mutual information is symmetric and vanishes on products") {
    for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
        Shape5 sh(2, 2, 2, 2, 2);
        Joint5 q = random_interior_joint(sh, seed);
        const std::vector<int> a{kAxisU, kAxisX}, b{kAxisV, kAxisY}, c{kAxisS};
        CHECK(mutual_info(q, a, b, c) == doctest::Approx(mutual_info(q, b, a, c)).epsilon(1e-12));
        CHECK(mutual_info(q, a, b, c) >= 0.0);
    }
    auto [w, p_s] = testutil::load_fixture("useless_binary");
    Joint5 prod = Joint5::independent(testutil::random_dist(3, 5), testutil::random_dist(2, 6),
                                      p_s, testutil::random_dist(2, 7), w);
    // U,V,(S,X) independent and Y independent of everything for this channel
    CHECK(mutual_info(prod, kU_, std::vector<int>{kAxisV}) < 1e-12);
    CHECK(mutual_info(prod, kU_, kY_) < 1e-12);
}

TEST_CASE("conditional rows recombine to the joint marginal") {
    Shape5 sh(2, 3, 2, 2, 2);
    Joint5 q = random_interior_joint(sh, 77);
    const std::vector<int> target{kAxisV, kAxisY}, given{kAxisU, kAxisS};
    CondTable c = conditional(q, target, given);
    Marginal mg = marginal(q, given);
    Marginal full = marginal(q, std::vector<int>{kAxisU, kAxisV, kAxisS, kAxisY});
    for (int u = 0; u < 2; ++u)
        for (int s = 0; s < 2; ++s) {
            std::size_t g = static_cast<std::size_t>(u) * 2 + s;
            for (int v = 0; v < 3; ++v)
                for (int y = 0; y < 2; ++y) {
                    double reconstructed =
                        mg.p[g] * c.value(g, static_cast<std::size_t>(v) * 2 + y);
                    double expect = full.p[full.index(std::array{u, v, s, y})];
                    CHECK(std::abs(reconstructed - expect) < 1e-12);
                }
        }
}

TEST_CASE("conditional KL divergence against a channel") {
    auto [w, p_s] = testutil::load_fixture("bsc01_stateless");
    Joint5 q = Joint5::independent(Dist::uniform(2), Dist::uniform(2), p_s, Dist::uniform(2), w);
    CondTable c = conditional(q, kY_, kUVSX);
    Marginal weights = marginal(q, kUVSX);

    SUBCASE("zero against itself") { CHECK(kl_cond(c, w, weights) == doctest::Approx(0.0)); }

    SUBCASE("infinite off the channel support") {
        auto noiseless = testutil::load_fixture("noiseless_binary");
        // q puts mass where the noiseless channel has none
        Joint5 q2 = Joint5::independent(Dist::uniform(2), Dist::uniform(2), noiseless.p_s,
                                        Dist::uniform(2), w);
        CondTable c2 = conditional(q2, kY_, kUVSX);
        Marginal w2 = marginal(q2, kUVSX);
        CHECK(std::isinf(kl_cond(c2, noiseless.w, w2)));
    }

    SUBCASE("scalar evaluation oracle") {
        // single-row table: q = (0.6, 0.4) against W-row (0.5, 0.5)
        Shape5 sh(1, 1, 1, 1, 2);
        Joint5 qs(sh, {0.6, 0.4});
        Channel ref(1, 1, 2, {0.5, 0.5});
        CondTable cs = conditional(qs, kY_, kUVSX);
        Marginal ws = marginal(qs, kUVSX);
        const double expect = 0.6 * std::log(1.2) + 0.4 * std::log(0.8);
        CHECK(kl_cond(cs, ref, ws) == doctest::Approx(expect).epsilon(1e-12));
    }

    SUBCASE("perturbation strictly increases the divergence") {
        for (std::uint64_t seed : {11u, 12u}) {
            Shape5 sh(2, 2, 2, 2, 2);
            Joint5 qp = random_interior_joint(sh, seed);
            CondTable cp = conditional(qp, kY_, kUVSX);
            Marginal wp = marginal(qp, kUVSX);
            double d = kl_cond(cp, w, wp);
            CHECK(d >= 0.0);
            // qp's conditional differs from the BSC kernel almost surely
            CHECK(d > 1e-6);
        }
    }
}
