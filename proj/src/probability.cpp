#include "sdcexp/probability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace sdcexp {

namespace {

void check_axes(std::span<const int> axes, const char* what) {
    if (axes.empty()) throw std::invalid_argument(std::string(what) + ": empty axis set");
    for (std::size_t i = 0; i < axes.size(); ++i) {
        if (axes[i] < 0 || axes[i] >= kNumAxes)
            throw std::invalid_argument(std::string(what) + ": axis out of range");
        if (i > 0 && axes[i] <= axes[i - 1])
            throw std::invalid_argument(std::string(what) + ": axes must be strictly ascending");
    }
}

bool disjoint(std::span<const int> a, std::span<const int> b) {
    for (int i : a)
        for (int j : b)
            if (i == j) return false;
    return true;
}

}  // namespace

Dist::Dist(std::vector<double> probs) : p(std::move(probs)) { validate(); }

void Dist::validate() const {
    if (p.empty()) throw std::invalid_argument("Dist: alphabet size must be >= 1");
    double sum = 0.0;
    for (double v : p) {
        if (!(v >= 0.0)) throw std::invalid_argument("Dist: negative or NaN entry");
        sum += v;
    }
    if (std::abs(sum - 1.0) > kMassTol)
        throw std::invalid_argument("Dist: entries sum to " + std::to_string(sum) +
                                    ", expected 1 within 1e-12");
}

Dist Dist::uniform(int n) {
    if (n < 1) throw std::invalid_argument("Dist: alphabet size must be >= 1");
    return Dist(std::vector<double>(static_cast<std::size_t>(n), 1.0 / n));
}

Channel::Channel(int s, int x, int y, std::vector<double> rows)
    : s_size(s), x_size(x), y_size(y), w(std::move(rows)) {
    validate();
}

void Channel::validate() const {
    if (s_size < 1 || x_size < 1 || y_size < 1)
        throw std::invalid_argument("Channel: alphabet sizes must be >= 1");
    if (w.size() != static_cast<std::size_t>(s_size) * x_size * y_size)
        throw std::invalid_argument("Channel: table size does not match alphabets");
    for (int s = 0; s < s_size; ++s)
        for (int x = 0; x < x_size; ++x) {
            double sum = 0.0;
            for (int y = 0; y < y_size; ++y) {
                double v = (*this)(s, x, y);
                if (!(v >= 0.0))
                    throw std::invalid_argument("Channel: negative or NaN entry in row (" +
                                                std::to_string(s) + "," + std::to_string(x) + ")");
                sum += v;
            }
            if (std::abs(sum - 1.0) > kMassTol)
                throw std::invalid_argument("Channel: row (" + std::to_string(s) + "," +
                                            std::to_string(x) + ") sums to " + std::to_string(sum));
        }
}

Joint5::Joint5(Shape5 sh, std::vector<double> m) : shape(sh), mass(std::move(m)) { validate(); }

void Joint5::validate() const {
    if (mass.size() != shape.size())
        throw std::invalid_argument("Joint5: mass size does not match shape");
    double sum = 0.0;
    for (double v : mass) {
        if (!(v >= 0.0)) throw std::invalid_argument("Joint5: negative or NaN entry");
        sum += v;
    }
    if (std::abs(sum - 1.0) > kMassTol)
        throw std::invalid_argument("Joint5: total mass " + std::to_string(sum) +
                                    ", expected 1 within 1e-12");
}

Joint5 Joint5::independent(const Dist& pu, const Dist& pv, const Dist& ps,
                           const Dist& px, const Channel& w) {
    Shape5 sh(pu.size(), pv.size(), ps.size(), px.size(), w.y_size);
    if (ps.size() != w.s_size || px.size() != w.x_size)
        throw std::invalid_argument("Joint5::independent: channel alphabets do not match");
    std::vector<double> m(sh.size());
    std::size_t idx = 0;
    for (int u = 0; u < sh.u(); ++u)
        for (int v = 0; v < sh.v(); ++v)
            for (int s = 0; s < sh.s(); ++s)
                for (int x = 0; x < sh.x(); ++x) {
                    double base = pu[u] * pv[v] * ps[s] * px[x];
                    for (int y = 0; y < sh.y(); ++y) m[idx++] = base * w(s, x, y);
                }
    Joint5 j;
    j.shape = sh;
    j.mass = std::move(m);
    return j;
}

double Marginal::sum() const { return std::accumulate(p.begin(), p.end(), 0.0); }

Joint5 pad_aux(const Joint5& q, Shape5 target) {
    const auto& sh = q.shape;
    if (sh.u() > target.u() || sh.v() > target.v() || sh.s() != target.s() ||
        sh.x() != target.x() || sh.y() != target.y())
        throw std::invalid_argument("pad_aux: shapes are not compatible");
    Joint5 out;
    out.shape = target;
    out.mass.assign(target.size(), 0.0);
    std::size_t idx = 0;
    for (int u = 0; u < sh.u(); ++u)
        for (int v = 0; v < sh.v(); ++v)
            for (int s = 0; s < sh.s(); ++s)
                for (int x = 0; x < sh.x(); ++x)
                    for (int y = 0; y < sh.y(); ++y, ++idx)
                        out.mass[target.index({u, v, s, x, y})] = q.mass[idx];
    return out;
}

Marginal marginal(const Joint5& joint, std::span<const int> keep) {
    check_axes(keep, "marginal");
    Marginal out;
    out.axes.assign(keep.begin(), keep.end());
    std::size_t n = 1;
    for (int a : out.axes) {
        out.dims.push_back(joint.shape.dim[a]);
        n *= static_cast<std::size_t>(joint.shape.dim[a]);
    }
    out.p.assign(n, 0.0);

    const auto& dim = joint.shape.dim;
    std::array<int, 5> c{};
    std::size_t idx = 0;
    for (c[0] = 0; c[0] < dim[0]; ++c[0])
        for (c[1] = 0; c[1] < dim[1]; ++c[1])
            for (c[2] = 0; c[2] < dim[2]; ++c[2])
                for (c[3] = 0; c[3] < dim[3]; ++c[3])
                    for (c[4] = 0; c[4] < dim[4]; ++c[4]) {
                        std::size_t k = 0;
                        for (std::size_t a = 0; a < out.axes.size(); ++a)
                            k = k * out.dims[a] + c[out.axes[a]];
                        out.p[k] += joint.mass[idx++];
                    }
    return out;
}

CondTable conditional(const Joint5& joint, std::span<const int> target,
                      std::span<const int> given) {
    check_axes(target, "conditional target");
    check_axes(given, "conditional given");
    if (!disjoint(target, given))
        throw std::invalid_argument("conditional: target and given overlap");

    CondTable out;
    out.target_axes.assign(target.begin(), target.end());
    out.given_axes.assign(given.begin(), given.end());
    for (int a : out.target_axes) {
        out.target_dims.push_back(joint.shape.dim[a]);
        out.n_target *= static_cast<std::size_t>(joint.shape.dim[a]);
    }
    for (int a : out.given_axes) {
        out.given_dims.push_back(joint.shape.dim[a]);
        out.n_given *= static_cast<std::size_t>(joint.shape.dim[a]);
    }
    out.p.assign(out.n_given * out.n_target, 0.0);
    std::vector<double> row_mass(out.n_given, 0.0);

    const auto& dim = joint.shape.dim;
    std::array<int, 5> c{};
    std::size_t idx = 0;
    for (c[0] = 0; c[0] < dim[0]; ++c[0])
        for (c[1] = 0; c[1] < dim[1]; ++c[1])
            for (c[2] = 0; c[2] < dim[2]; ++c[2])
                for (c[3] = 0; c[3] < dim[3]; ++c[3])
                    for (c[4] = 0; c[4] < dim[4]; ++c[4]) {
                        std::size_t g = 0, t = 0;
                        for (std::size_t a = 0; a < out.given_axes.size(); ++a)
                            g = g * out.given_dims[a] + c[out.given_axes[a]];
                        for (std::size_t a = 0; a < out.target_axes.size(); ++a)
                            t = t * out.target_dims[a] + c[out.target_axes[a]];
                        double m = joint.mass[idx++];
                        out.p[g * out.n_target + t] += m;
                        row_mass[g] += m;
                    }

    out.defined.assign(out.n_given, 0);
    for (std::size_t g = 0; g < out.n_given; ++g) {
        if (row_mass[g] > 0.0) {
            out.defined[g] = 1;
            for (std::size_t t = 0; t < out.n_target; ++t)
                out.p[g * out.n_target + t] /= row_mass[g];
        }
    }
    return out;
}

double mutual_info(const Joint5& joint, std::span<const int> a,
                   std::span<const int> b, std::span<const int> c) {
    check_axes(a, "mutual_info a");
    check_axes(b, "mutual_info b");
    if (!c.empty()) check_axes(c, "mutual_info c");
    if (!disjoint(a, b) || !disjoint(a, c) || !disjoint(b, c))
        throw std::invalid_argument("mutual_info: axis sets must be pairwise disjoint");

    auto merged = [](std::span<const int> s1, std::span<const int> s2) {
        std::vector<int> m(s1.begin(), s1.end());
        m.insert(m.end(), s2.begin(), s2.end());
        std::sort(m.begin(), m.end());
        return m;
    };
    std::vector<int> abc = merged(merged(a, b), c);
    std::vector<int> ac = merged(a, c);
    std::vector<int> bc = merged(b, c);

    Marginal m_abc = marginal(joint, abc);
    Marginal m_ac = marginal(joint, ac);
    Marginal m_bc = marginal(joint, bc);
    Marginal m_c;
    if (!c.empty()) m_c = marginal(joint, c);

    // I(A;B|C) = sum q(abc) ln[ q(abc) q(c) / (q(ac) q(bc)) ].
    auto project = [](const Marginal& src, const std::vector<int>& sub,
                      const std::vector<int>& coords) {
        std::size_t k = 0;
        std::size_t ci = 0;
        for (std::size_t i = 0; i < src.axes.size(); ++i) {
            while (sub[ci] != src.axes[i]) ++ci;  // sub is a superset, aligned scan
            k = k * src.dims[i] + coords[ci];
        }
        return k;
    };

    double total = 0.0;
    std::vector<int> coords(abc.size(), 0);
    for (std::size_t idx = 0; idx < m_abc.p.size(); ++idx) {
        double q = m_abc.p[idx];
        if (q > 0.0) {
            double lq = std::log(q);
            double lac = std::log(m_ac.p[project(m_ac, abc, coords)]);
            double lbc = std::log(m_bc.p[project(m_bc, abc, coords)]);
            double lc = c.empty() ? 0.0 : std::log(m_c.p[project(m_c, abc, coords)]);
            total += q * (lq + lc - lac - lbc);
        }
        for (int i = static_cast<int>(coords.size()) - 1; i >= 0; --i) {
            if (++coords[i] < m_abc.dims[i]) break;
            coords[i] = 0;
        }
    }
    return std::max(total, 0.0);
}

double kl_cond(const CondTable& q_cond, const Channel& ref, const Marginal& weights) {
    // q_cond must condition Y on {U,V,S,X}; weights over the same given axes.
    const std::vector<int> want_given{kAxisU, kAxisV, kAxisS, kAxisX};
    if (q_cond.target_axes != std::vector<int>{kAxisY} || q_cond.given_axes != want_given)
        throw std::invalid_argument("kl_cond: expected a Y|UVSX conditional");
    if (weights.axes != want_given || weights.p.size() != q_cond.n_given)
        throw std::invalid_argument("kl_cond: weights do not match the conditional's rows");
    if (q_cond.target_dims[0] != ref.y_size ||
        q_cond.given_dims[2] != ref.s_size || q_cond.given_dims[3] != ref.x_size)
        throw std::invalid_argument("kl_cond: channel alphabets do not match");

    const int S = ref.s_size, X = ref.x_size, Y = ref.y_size;
    double total = 0.0;
    std::size_t g = 0;
    for (int u = 0; u < q_cond.given_dims[0]; ++u)
        for (int v = 0; v < q_cond.given_dims[1]; ++v)
            for (int s = 0; s < S; ++s)
                for (int x = 0; x < X; ++x, ++g) {
                    double wgt = weights.p[g];
                    if (wgt <= 0.0 || !q_cond.defined[g]) continue;
                    double row = 0.0;
                    for (int y = 0; y < Y; ++y) {
                        double q = q_cond.value(g, static_cast<std::size_t>(y));
                        if (q <= 0.0) continue;
                        double r = ref(s, x, y);
                        if (r <= 0.0) return std::numeric_limits<double>::infinity();
                        row += q * std::log(q / r);
                    }
                    total += wgt * row;
                }
    return std::max(total, 0.0);
}

double entropy(std::span<const double> p) {
    double h = 0.0;
    for (double v : p)
        if (v > 0.0) h -= v * std::log(v);
    return h;
}

}  // namespace sdcexp
