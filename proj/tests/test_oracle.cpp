#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "sdcexp/oracle.hpp"
#include "sdcexp/optimizer.hpp"

using namespace sdcexp;

namespace {

Code identity_code_n1(int k_size) {
    // y = x decoding at blocklength 1 for binary alphabets, single state code
    Code c;
    c.n = 1;
    c.k_size = k_size;
    c.m_size = 1;
    c.state_enc = {0, 0};
    c.chan_enc = {0, 0, 1, 1};  // x = k for every state
    c.decoder = {0, 1};         // k = y
    return c;
}

// Exact-rational cross-implementation for deterministic 0/1 channels at n=1:
// every pc is an integer multiple of 1/(k * denom) where p_S = num/denom.
struct RationalGn {
    long long best_num = -1;
    long long denom = 1;
};

RationalGn rational_gn_stuck_at(int k_size) {
    // p_S = (1/4, 1/4, 2/4); W deterministic: s=0 -> y=0, s=1 -> y=1, s=2 -> y=x.
    const std::array<long long, 3> ps_num{1, 1, 2};
    const long long ps_den = 4;
    RationalGn out;
    out.denom = ps_den * k_size;
    // state encoder is trivial (m=1); enumerate chan_enc (k,s)->x and dec y->k
    const int n_chan = 1 << (k_size * 3);  // binary x per (k,s)
    const int n_dec = 1 << 2;              // k in {0,1} per y (k_size = 2)
    REQUIRE(k_size == 2);
    for (int ce = 0; ce < n_chan; ++ce)
        for (int de = 0; de < n_dec; ++de) {
            long long num = 0;
            for (int k = 0; k < k_size; ++k)
                for (int s = 0; s < 3; ++s) {
                    const int x = (ce >> (k * 3 + s)) & 1;
                    const int y = (s == 0) ? 0 : (s == 1) ? 1 : x;
                    const int dec = (de >> y) & 1;
                    if (dec == k) num += ps_num[static_cast<std::size_t>(s)];
                }
            if (num > out.best_num) out.best_num = num;
        }
    return out;
}

}  // namespace

TEST_CASE("exact correct-decoding probability on degenerate channels") {
    auto noiseless = testutil::load_fixture("noiseless_binary");
    auto useless = testutil::load_fixture("useless_binary");
    Code code = identity_code_n1(2);
    CHECK(pc_exact(noiseless.w, noiseless.p_s, code) == doctest::Approx(1.0));
    CHECK(pc_exact(useless.w, useless.p_s, code) == doctest::Approx(0.5));
}

TEST_CASE("pc_exact agrees with a seeded Monte Carlo estimate at n=2") {
    Channel w = testutil::random_channel(2, 2, 2, 9001);
    Dist p_s = testutil::random_dist(2, 9002);
    std::mt19937_64 gen(5);
    Code code;
    code.n = 2;
    code.k_size = 2;
    code.m_size = 2;
    code.state_enc.resize(4);
    code.chan_enc.resize(8);
    code.decoder.resize(8);
    for (auto& v : code.state_enc) v = static_cast<int>(gen() % 2);
    for (auto& v : code.chan_enc) v = static_cast<int>(gen() % 4);
    for (auto& v : code.decoder) v = static_cast<int>(gen() % 2);

    const double exact = pc_exact(w, p_s, code);
    McResult mc = mc_pc(w, p_s, code, 1000000, 777);
    CHECK(std::abs(mc.estimate - exact) <= 3.0 * std::max(mc.std_error, 1e-9) + 1e-9);
}

TEST_CASE("exhaustive search on blocklength-one binary instances") {
    SUBCASE("noiseless channel admits a perfect code") {
        auto fx = testutil::load_fixture("noiseless_binary");
        GnResult res = g_n_exhaustive(fx.w, fx.p_s, 1, 2, 1);
        CHECK(res.g_value == doctest::Approx(0.0));
        CHECK(res.pc_star == doctest::Approx(1.0));
    }
    SUBCASE("useless channel caps pc at one half over all 64 codes") {
        auto fx = testutil::load_fixture("useless_binary");
        GnResult res = g_n_exhaustive(fx.w, fx.p_s, 1, 2, 1);
        CHECK(res.codes_enumerated == doctest::Approx(64.0));
        CHECK(res.pc_star == doctest::Approx(0.5));
        CHECK(res.g_value == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    }
    SUBCASE("stuck-at memory matches the exact-rational enumeration") {
        auto fx = testutil::load_fixture("stuck_at_memory_beta05");
        GnResult res = g_n_exhaustive(fx.w, fx.p_s, 1, 2, 1);
        RationalGn oracle = rational_gn_stuck_at(2);
        const double pc_oracle =
            static_cast<double>(oracle.best_num) / static_cast<double>(oracle.denom);
        CHECK(res.pc_star == doctest::Approx(pc_oracle).epsilon(1e-15));
        CHECK(res.g_value == doctest::Approx(std::log(4.0 / 3.0)).epsilon(1e-12));
    }
}

TEST_CASE("enumeration guard refuses oversized instances with the count") {
    auto fx = testutil::load_fixture("bsc01_stateless");
    const double count = code_count(fx.w, 2, 4, 2);
    CHECK(count > 1e9);
    CHECK_THROWS_AS(g_n_exhaustive(fx.w, fx.p_s, 2, 4, 2), GuardError);
}

TEST_CASE("g is monotone in the code sizes") {
    auto fx = testutil::load_fixture("bsc01_stateless");
    // nonincreasing in m
    GnResult m1 = g_n_exhaustive(fx.w, fx.p_s, 1, 2, 1);
    GnResult m2 = g_n_exhaustive(fx.w, fx.p_s, 1, 2, 2);
    CHECK(m2.g_value <= m1.g_value + 1e-12);
    // nondecreasing in k
    auto stuck = testutil::load_fixture("stuck_at_memory_beta05");
    GnResult k2 = g_n_exhaustive(stuck.w, stuck.p_s, 1, 2, 1);
    GnResult k3 = g_n_exhaustive(stuck.w, stuck.p_s, 1, 3, 1);
    CHECK(k3.g_value >= k2.g_value - 1e-12);
}

TEST_CASE("subadditivity of the exhaustive exponent across blocklengths") {
    // state-free BSC: G^(2) at rate ln 2 uses k=4, comparable with G^(1) at k=2
    Channel bsc(1, 2, 2, {0.9, 0.1, 0.1, 0.9});
    Dist p_s({1.0});
    GnResult g1 = g_n_exhaustive(bsc, p_s, 1, 2, 1);
    GnResult g2 = g_n_exhaustive(bsc, p_s, 2, 4, 1);
    CHECK(g1.g_value == doctest::Approx(-std::log(0.9)).epsilon(1e-12));
    CHECK(g2.g_value <= g1.g_value + 1e-12);
}

TEST_CASE("deterministic codes are sufficient") {
    // P_c is affine in each stochastic-encoder row, so random stochastic
    // encoders can never beat the deterministic optimum.
    std::mt19937_64 gen(4242);
    int instances = 0;
    for (std::uint64_t seed = 0; instances < 50; ++seed) {
        Channel w = testutil::random_channel(2, 2, 2, 7000 + seed);
        Dist p_s = testutil::random_dist(2, 8000 + seed);
        GnResult det = g_n_exhaustive(w, p_s, 1, 2, 1);
        double best_stochastic = 0.0;
        for (int trial = 0; trial < 1000; ++trial) {
            std::vector<int> state_enc{0, 0};
            std::vector<std::vector<double>> rows(4);
            for (auto& row : rows) {
                double a = uniform01(gen);
                row = {a, 1.0 - a};
            }
            std::vector<int> dec{static_cast<int>(gen() % 2), static_cast<int>(gen() % 2)};
            best_stochastic = std::max(
                best_stochastic, pc_exact_stochastic(w, p_s, 1, 2, 1, state_enc, rows, dec));
        }
        CHECK(best_stochastic <= det.pc_star + 1e-12);
        ++instances;
    }
}

TEST_CASE("Monte Carlo estimator behaviour") {
    auto noiseless = testutil::load_fixture("noiseless_binary");
    Code perfect = identity_code_n1(2);
    McResult mc = mc_pc(noiseless.w, noiseless.p_s, perfect, 20000, 3);
    CHECK(mc.estimate == 1.0);
    CHECK(mc.std_error == 0.0);

    auto useless = testutil::load_fixture("useless_binary");
    McResult half = mc_pc(useless.w, useless.p_s, perfect, 1000000, 4);
    CHECK(std::abs(half.estimate - 0.5) <= 3.0 * 5e-4 + 1e-9);

    McResult again = mc_pc(useless.w, useless.p_s, perfect, 1000000, 4);
    CHECK(half.estimate == again.estimate);
}

TEST_CASE("main theorem holds over a batch of enumerable instances") {
    auto fx = testutil::load_fixture("useless_binary");
    OptConfig cfg;
    SearchSpec search{7, 1e-2, 1e2, 1, 5};
    int ran = 0;
    for (int k = 1; k <= 5; ++k)
        for (int m = 1; m <= 5; ++m) {
            // keep the unit-test batch to quickly enumerable instances
            if (code_count(fx.w, 1, k, m) > 1e6) continue;
            TheoremReport rep = verify_main_theorem(fx.w, fx.p_s, 1, k, m, search, cfg);
            INFO("k=", k, " m=", m);
            CHECK(rep.pass);
            ++ran;
        }
    CHECK(ran >= 12);
}

TEST_CASE("main theorem at blocklength two") {
    auto fx = testutil::load_fixture("useless_binary");
    OptConfig cfg;
    SearchSpec search{7, 1e-2, 1e2, 1, 5};
    TheoremReport rep = verify_main_theorem(fx.w, fx.p_s, 2, 2, 1, search, cfg);
    CHECK(rep.pass);
    // two messages through two useless uses still cap pc at one half
    CHECK(rep.pc_star == doctest::Approx(0.5));
    CHECK(rep.g_value == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-12));
    CHECK(rep.rate.r == doctest::Approx(0.5 * std::log(2.0)));
    CHECK(rep.slack == doctest::Approx(rep.g_value - rep.f_sup + std::log(5.0) / 2).epsilon(1e-12));
}

TEST_CASE("main theorem verification on the useless binary instance") {
    auto fx = testutil::load_fixture("useless_binary");
    OptConfig cfg;
    SearchSpec search{7, 1e-2, 1e2, 1, 5};
    TheoremReport rep = verify_main_theorem(fx.w, fx.p_s, 1, 2, 1, search, cfg);
    CHECK(rep.pass);
    CHECK(rep.g_value == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(rep.slack == doctest::Approx(std::log(2.0) + std::log(5.0) - rep.f_sup).epsilon(1e-12));
    CHECK(rep.slack >= 0.0);
    CHECK(rep.pc_star <= rep.pc_bound + 1e-12);
}
