#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace sdcexp {

// splitmix64; used to derive independent deterministic seeds.
inline std::uint64_t mix_seed(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    return mix_seed(a ^ mix_seed(b));
}

inline std::uint64_t double_bits(double x) {
    std::uint64_t u;
    static_assert(sizeof(u) == sizeof(x));
    __builtin_memcpy(&u, &x, sizeof(u));
    return u;
}

// Uniform in (0,1), built directly from the generator's 64-bit output so the
// stream does not depend on the standard library's distribution internals.
template <class Gen>
double uniform01(Gen& gen) {
    return (static_cast<double>(gen() >> 11) + 0.5) * 0x1.0p-53;
}

template <class Gen>
double exponential1(Gen& gen) {
    return -std::log1p(-uniform01(gen));
}

inline std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> g;
    g.reserve(static_cast<std::size_t>(n));
    if (n == 1) {
        g.push_back(lo);
        return g;
    }
    const double step = (std::log(hi) - std::log(lo)) / (n - 1);
    for (int i = 0; i < n; ++i) g.push_back(std::exp(std::log(lo) + step * i));
    return g;
}

// 12 significant digits, the precision used for all CSV output.
std::string format_sig(double x);

}  // namespace sdcexp
