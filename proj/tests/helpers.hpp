#pragma once

#include <array>
#include <random>
#include <string>
#include <vector>

#include "sdcexp/channel_spec.hpp"
#include "sdcexp/probability.hpp"
#include "sdcexp/util.hpp"

#ifndef SDCEXP_CHANNEL_DIR
#define SDCEXP_CHANNEL_DIR "channels"
#endif

namespace testutil {

inline std::string channel_path(const std::string& name) {
    return std::string(SDCEXP_CHANNEL_DIR) + "/" + name + ".json";
}

struct Fixture {
    sdcexp::Channel w;
    sdcexp::Dist p_s;
};

inline Fixture load_fixture(const std::string& name) {
    auto spec = sdcexp::load_channel_spec(channel_path(name));
    return Fixture{spec.channel(), spec.state()};
}

// Joint with integer cell weights over a common denominator; conditionals and
// marginals of such joints have exact integer-ratio values, which the tests
// use as an independent oracle.
struct IntegerJoint {
    sdcexp::Joint5 joint;
    std::vector<long long> weights;
    long long total = 0;
};

inline IntegerJoint integer_joint(sdcexp::Shape5 sh, std::uint64_t seed, int max_weight = 20) {
    std::mt19937_64 gen(sdcexp::mix_seed(seed));
    IntegerJoint out;
    out.weights.resize(sh.size());
    for (auto& w : out.weights) {
        w = static_cast<long long>(gen() % static_cast<std::uint64_t>(max_weight + 1));
        out.total += w;
    }
    if (out.total == 0) {
        out.weights[0] = 1;
        out.total = 1;
    }
    std::vector<double> mass(sh.size());
    for (std::size_t i = 0; i < mass.size(); ++i)
        mass[i] = static_cast<double>(out.weights[i]) / static_cast<double>(out.total);
    out.joint.shape = sh;
    out.joint.mass = std::move(mass);
    return out;
}

inline sdcexp::Channel random_channel(int s, int x, int y, std::uint64_t seed) {
    std::mt19937_64 gen(sdcexp::mix_seed(seed));
    std::vector<double> rows(static_cast<std::size_t>(s) * x * y);
    for (int i = 0; i < s * x; ++i) {
        double sum = 0.0;
        for (int j = 0; j < y; ++j) {
            double v = 0.05 + sdcexp::exponential1(gen);
            rows[static_cast<std::size_t>(i) * y + j] = v;
            sum += v;
        }
        for (int j = 0; j < y; ++j) rows[static_cast<std::size_t>(i) * y + j] /= sum;
    }
    return sdcexp::Channel(s, x, y, std::move(rows));
}

inline sdcexp::Dist random_dist(int n, std::uint64_t seed) {
    std::mt19937_64 gen(sdcexp::mix_seed(seed));
    std::vector<double> p(static_cast<std::size_t>(n));
    double sum = 0.0;
    for (auto& v : p) {
        v = 0.05 + sdcexp::exponential1(gen);
        sum += v;
    }
    for (auto& v : p) v /= sum;
    return sdcexp::Dist(std::move(p));
}

}  // namespace testutil
