#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sdcexp {

// Axis indices of the five-way joint (U,V,S,X,Y). All mass arrays are dense
// and row-major in this fixed axis order; axis subsets are given as sorted
// lists of these indices.
inline constexpr int kAxisU = 0;
inline constexpr int kAxisV = 1;
inline constexpr int kAxisS = 2;
inline constexpr int kAxisX = 3;
inline constexpr int kAxisY = 4;
inline constexpr int kNumAxes = 5;

// Sum-to-one tolerance enforced on construction. Inputs are never
// renormalized silently.
inline constexpr double kMassTol = 1e-12;

struct Shape5 {
    std::array<int, 5> dim{1, 1, 1, 1, 1};

    Shape5() = default;
    Shape5(int u, int v, int s, int x, int y) : dim{u, v, s, x, y} {}

    int u() const { return dim[0]; }
    int v() const { return dim[1]; }
    int s() const { return dim[2]; }
    int x() const { return dim[3]; }
    int y() const { return dim[4]; }

    std::size_t size() const {
        std::size_t n = 1;
        for (int d : dim) n *= static_cast<std::size_t>(d);
        return n;
    }

    std::size_t index(const std::array<int, 5>& c) const {
        std::size_t idx = 0;
        for (int a = 0; a < 5; ++a) idx = idx * dim[a] + c[a];
        return idx;
    }

    std::array<int, 5> unpack(std::size_t idx) const {
        std::array<int, 5> c{};
        for (int a = 4; a >= 0; --a) {
            c[a] = static_cast<int>(idx % dim[a]);
            idx /= dim[a];
        }
        return c;
    }

    bool operator==(const Shape5&) const = default;
};

// Probability distribution over a finite alphabet {0,...,size-1}.
struct Dist {
    std::vector<double> p;

    Dist() = default;
    explicit Dist(std::vector<double> probs);

    int size() const { return static_cast<int>(p.size()); }
    double operator[](int i) const { return p[static_cast<std::size_t>(i)]; }

    static Dist uniform(int n);
    void validate() const;
};

// Stochastic matrix W(y|x,s): each (s,x) row is a distribution over Y.
struct Channel {
    int s_size = 0;
    int x_size = 0;
    int y_size = 0;
    std::vector<double> w;  // [s][x][y]

    Channel() = default;
    Channel(int s, int x, int y, std::vector<double> rows);

    double operator()(int s, int x, int y) const {
        return w[(static_cast<std::size_t>(s) * x_size + x) * y_size + y];
    }
    void validate() const;
};

// Joint probability mass function over U x V x S x X x Y.
struct Joint5 {
    Shape5 shape;
    std::vector<double> mass;

    Joint5() = default;
    Joint5(Shape5 sh, std::vector<double> m);

    double at(int u, int v, int s, int x, int y) const {
        return mass[shape.index({u, v, s, x, y})];
    }
    void validate() const;

    // q(u,v,s,x,y) = pu(u) pv(v) ps(s) px(x) W(y|x,s); channel-consistent with
    // all of U,V,(S,X) independent.
    static Joint5 independent(const Dist& pu, const Dist& pv, const Dist& ps,
                              const Dist& px, const Channel& w);
};

// Marginal of a Joint5 over a kept subset of axes, in canonical axis order.
struct Marginal {
    std::vector<int> axes;  // kept axes, ascending
    std::vector<int> dims;
    std::vector<double> p;

    std::size_t index(std::span<const int> coords) const {
        std::size_t idx = 0;
        for (std::size_t a = 0; a < dims.size(); ++a)
            idx = idx * dims[a] + coords[a];
        return idx;
    }
    double sum() const;
};

// Conditional table target|given. Rows are indexed by the given-tuple
// (canonical order); rows with zero conditioning mass are flagged undefined.
struct CondTable {
    std::vector<int> target_axes;
    std::vector<int> given_axes;
    std::vector<int> target_dims;
    std::vector<int> given_dims;
    std::size_t n_target = 1;
    std::size_t n_given = 1;
    std::vector<double> p;           // [given][target]
    std::vector<std::uint8_t> defined;  // per given-tuple

    double value(std::size_t given_idx, std::size_t target_idx) const {
        return p[given_idx * n_target + target_idx];
    }
};

// Embeds a joint into larger auxiliary alphabets by padding U,V with
// zero-mass symbols.
Joint5 pad_aux(const Joint5& q, Shape5 target);

Marginal marginal(const Joint5& joint, std::span<const int> keep);
CondTable conditional(const Joint5& joint, std::span<const int> target,
                      std::span<const int> given);

// I(A;B|C) in nats, with the 0 log 0 convention; clamped to be nonnegative.
double mutual_info(const Joint5& joint, std::span<const int> a,
                   std::span<const int> b, std::span<const int> c = {});

// D(q_{Y|XSUV} || W | weights): conditional KL divergence of a Y|UVSX table
// against the channel, averaged by a marginal over U,V,S,X. +infinity when
// absolute continuity fails on a positive-weight row.
double kl_cond(const CondTable& q_cond, const Channel& ref,
               const Marginal& weights);

double entropy(std::span<const double> p);

}  // namespace sdcexp
