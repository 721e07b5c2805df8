#include "sdcexp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "sdcexp/optimizer.hpp"
#include "sdcexp/util.hpp"

namespace sdcexp {

namespace {

long long ipow(int base, int exp) {
    long long r = 1;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

std::vector<int> digits_of(long long idx, int base, int n) {
    std::vector<int> d(static_cast<std::size_t>(n));
    for (int t = n - 1; t >= 0; --t) {
        d[static_cast<std::size_t>(t)] = static_cast<int>(idx % base);
        idx /= base;
    }
    return d;
}

}  // namespace

void Code::validate(const Channel& w) const {
    if (n < 1 || k_size < 1 || m_size < 1)
        throw std::invalid_argument("Code: n, k_size, m_size must be >= 1");
    const long long sn = ipow(w.s_size, n);
    const long long yn = ipow(w.y_size, n);
    const long long xn = ipow(w.x_size, n);
    if (state_enc.size() != static_cast<std::size_t>(sn))
        throw std::invalid_argument("Code: state encoder table has wrong size");
    if (chan_enc.size() != static_cast<std::size_t>(k_size) * sn)
        throw std::invalid_argument("Code: channel encoder table has wrong size");
    if (decoder.size() != static_cast<std::size_t>(yn) * m_size)
        throw std::invalid_argument("Code: decoder table has wrong size");
    for (int v : state_enc)
        if (v < 0 || v >= m_size) throw std::invalid_argument("Code: state encoder value out of range");
    for (int v : chan_enc)
        if (v < 0 || v >= xn) throw std::invalid_argument("Code: channel encoder value out of range");
    for (int v : decoder)
        if (v < 0 || v >= k_size) throw std::invalid_argument("Code: decoder value out of range");
}

namespace {

// Shared accumulation: P_c = (1/K) sum_{k,s^n} p^n(s^n)
//   sum_{y^n: dec(y^n, phi(s^n)) = k} W^n(y^n | x^n(k,s^n), s^n).
struct PcWork {
    const Channel& w;
    const Dist& p_s;
    int n, k_size, m_size;
    long long sn, yn;
    std::vector<std::vector<int>> s_digits, y_digits;
    std::vector<double> ps_n;  // p_S^n per s^n index

    PcWork(const Channel& w_, const Dist& p_s_, int n_, int k_, int m_)
        : w(w_), p_s(p_s_), n(n_), k_size(k_), m_size(m_) {
        sn = ipow(w.s_size, n);
        yn = ipow(w.y_size, n);
        s_digits.reserve(static_cast<std::size_t>(sn));
        ps_n.reserve(static_cast<std::size_t>(sn));
        for (long long si = 0; si < sn; ++si) {
            auto d = digits_of(si, w.s_size, n);
            double p = 1.0;
            for (int t = 0; t < n; ++t) p *= p_s[d[static_cast<std::size_t>(t)]];
            s_digits.push_back(std::move(d));
            ps_n.push_back(p);
        }
        y_digits.reserve(static_cast<std::size_t>(yn));
        for (long long yi = 0; yi < yn; ++yi) y_digits.push_back(digits_of(yi, w.y_size, n));
    }

    double wn(const std::vector<int>& xd, const std::vector<int>& sd,
              const std::vector<int>& yd) const {
        double p = 1.0;
        for (int t = 0; t < n; ++t)
            p *= w(sd[static_cast<std::size_t>(t)], xd[static_cast<std::size_t>(t)],
                   yd[static_cast<std::size_t>(t)]);
        return p;
    }
};

}  // namespace

double pc_exact(const Channel& w, const Dist& p_s, const Code& code) {
    code.validate(w);
    if (p_s.size() != w.s_size) throw std::invalid_argument("pc_exact: state distribution mismatch");
    PcWork work(w, p_s, code.n, code.k_size, code.m_size);
    double total = 0.0;
    for (int k = 0; k < code.k_size; ++k)
        for (long long si = 0; si < work.sn; ++si) {
            const int m = code.state_enc[static_cast<std::size_t>(si)];
            const long long xi = code.chan_enc[static_cast<std::size_t>(k) * work.sn + si];
            const auto xd = digits_of(xi, w.x_size, code.n);
            double correct = 0.0;
            for (long long yi = 0; yi < work.yn; ++yi)
                if (code.decoder[static_cast<std::size_t>(yi) * code.m_size + m] == k)
                    correct += work.wn(xd, work.s_digits[static_cast<std::size_t>(si)],
                                       work.y_digits[static_cast<std::size_t>(yi)]);
            total += work.ps_n[static_cast<std::size_t>(si)] * correct;
        }
    return total / code.k_size;
}

double pc_exact_stochastic(const Channel& w, const Dist& p_s, int n, int k_size,
                           int m_size, const std::vector<int>& state_enc,
                           const std::vector<std::vector<double>>& chan_enc_rows,
                           const std::vector<int>& decoder) {
    PcWork work(w, p_s, n, k_size, m_size);
    const long long xn = ipow(w.x_size, n);
    double total = 0.0;
    for (int k = 0; k < k_size; ++k)
        for (long long si = 0; si < work.sn; ++si) {
            const int m = state_enc[static_cast<std::size_t>(si)];
            const auto& row = chan_enc_rows[static_cast<std::size_t>(k) * work.sn + si];
            double correct = 0.0;
            for (long long xi = 0; xi < xn; ++xi) {
                if (!(row[static_cast<std::size_t>(xi)] > 0.0)) continue;
                const auto xd = digits_of(xi, w.x_size, n);
                double sum_y = 0.0;
                for (long long yi = 0; yi < work.yn; ++yi)
                    if (decoder[static_cast<std::size_t>(yi) * m_size + m] == k)
                        sum_y += work.wn(xd, work.s_digits[static_cast<std::size_t>(si)],
                                         work.y_digits[static_cast<std::size_t>(yi)]);
                correct += row[static_cast<std::size_t>(xi)] * sum_y;
            }
            total += work.ps_n[static_cast<std::size_t>(si)] * correct;
        }
    return total / k_size;
}

double code_count(const Channel& w, int n, int k_size, int m_size) {
    const double sn = std::pow(static_cast<double>(w.s_size), n);
    const double state_tables = std::pow(static_cast<double>(m_size), sn);
    const double chan_tables =
        std::pow(static_cast<double>(w.x_size), static_cast<double>(n) * k_size * sn);
    const double yn = std::pow(static_cast<double>(w.y_size), n);
    const double dec_tables = std::pow(static_cast<double>(k_size), yn * m_size);
    return state_tables * chan_tables * dec_tables;
}

GnResult g_n_exhaustive(const Channel& w, const Dist& p_s, int n, int k_size,
                        int m_size) {
    if (n < 1 || k_size < 1 || m_size < 1)
        throw std::invalid_argument("g_n_exhaustive: n, k_size, m_size must be >= 1");
    const double count = code_count(w, n, k_size, m_size);
    if (!(count <= 1e9))
        throw GuardError("g_n_exhaustive: instance has " + std::to_string(count) +
                             " deterministic codes, exceeding the 1e9 guard",
                         count);

    const long long sn = ipow(w.s_size, n);
    const long long yn = ipow(w.y_size, n);
    const long long xn = ipow(w.x_size, n);

    Code code;
    code.n = n;
    code.k_size = k_size;
    code.m_size = m_size;
    code.state_enc.assign(static_cast<std::size_t>(sn), 0);
    code.chan_enc.assign(static_cast<std::size_t>(k_size) * sn, 0);
    code.decoder.assign(static_cast<std::size_t>(yn) * m_size, 0);

    // W^n(y^n | x^n, s^n) tabulated once; the enumeration then only sums.
    PcWork work(w, p_s, n, k_size, m_size);
    std::vector<double> wn_tab(static_cast<std::size_t>(sn) * xn * yn);
    {
        std::size_t t = 0;
        for (long long si = 0; si < sn; ++si)
            for (long long xi = 0; xi < xn; ++xi) {
                const auto xd = digits_of(xi, w.x_size, n);
                for (long long yi = 0; yi < yn; ++yi, ++t)
                    wn_tab[t] = work.wn(xd, work.s_digits[static_cast<std::size_t>(si)],
                                        work.y_digits[static_cast<std::size_t>(yi)]);
            }
    }

    // Lexicographic enumeration over (state_enc, chan_enc, decoder); the
    // decoder digits advance fastest. First code with the maximal pc wins.
    GnResult best;
    best.pc_star = -1.0;
    best.codes_enumerated = count;

    auto advance = [](std::vector<int>& tbl, int base) {
        for (auto it = tbl.rbegin(); it != tbl.rend(); ++it) {
            if (++(*it) < base) return true;
            *it = 0;
        }
        return false;
    };

    auto pc_of = [&]() {
        double total = 0.0;
        for (int k = 0; k < k_size; ++k)
            for (long long si = 0; si < sn; ++si) {
                const int m = code.state_enc[static_cast<std::size_t>(si)];
                const long long xi = code.chan_enc[static_cast<std::size_t>(k) * sn + si];
                const double* row = &wn_tab[(static_cast<std::size_t>(si) * xn + xi) * yn];
                double correct = 0.0;
                for (long long yi = 0; yi < yn; ++yi)
                    if (code.decoder[static_cast<std::size_t>(yi) * m_size + m] == k)
                        correct += row[yi];
                total += work.ps_n[static_cast<std::size_t>(si)] * correct;
            }
        return total / k_size;
    };

    bool more_state = true;
    while (more_state) {
        bool more_chan = true;
        std::fill(code.chan_enc.begin(), code.chan_enc.end(), 0);
        while (more_chan) {
            bool more_dec = true;
            std::fill(code.decoder.begin(), code.decoder.end(), 0);
            while (more_dec) {
                const double pc = pc_of();
                if (pc > best.pc_star) {
                    best.pc_star = pc;
                    best.best_code = code;
                }
                more_dec = advance(code.decoder, k_size);
            }
            more_chan = advance(code.chan_enc, static_cast<int>(xn));
        }
        more_state = advance(code.state_enc, m_size);
    }
    best.g_value = best.pc_star > 0.0 ? -std::log(best.pc_star) / n
                                      : std::numeric_limits<double>::infinity();
    if (best.g_value == 0.0) best.g_value = 0.0;  // normalize -0 for reporting
    return best;
}

TheoremReport verify_main_theorem(const Channel& w, const Dist& p_s, int n,
                                  int k_size, int m_size, const SearchSpec& search,
                                  const OptConfig& cfg) {
    TheoremReport rep;
    rep.rate = RatePoint{std::log(static_cast<double>(m_size)) / n,
                         std::log(static_cast<double>(k_size)) / n};
    GnResult gn = g_n_exhaustive(w, p_s, n, k_size, m_size);
    rep.g_value = gn.g_value;
    rep.pc_star = gn.pc_star;

    ExponentSolver solver(w, cfg);
    FSupResult fs = solver.f_sup(rep.rate, search);
    rep.f_sup = fs.f;
    rep.f_argmax = fs.argmax;
    rep.slack = rep.g_value - (rep.f_sup - std::log(5.0) / n);
    rep.pc_bound = std::min(1.0, 5.0 * std::exp(-static_cast<double>(n) * rep.f_sup));
    rep.pass = rep.slack >= -1e-9 && rep.pc_star <= rep.pc_bound + 1e-12;
    return rep;
}

McResult mc_pc(const Channel& w, const Dist& p_s, const Code& code,
               std::int64_t trials, std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("mc_pc: trials must be >= 1");
    code.validate(w);
    PcWork work(w, p_s, code.n, code.k_size, code.m_size);
    std::mt19937_64 gen(mix_seed(seed));

    auto sample = [&](const double* p, int size) {
        double u = uniform01(gen);
        double acc = 0.0;
        for (int i = 0; i < size; ++i) {
            acc += p[i];
            if (u <= acc) return i;
        }
        return size - 1;
    };

    std::int64_t hits = 0;
    std::vector<int> sd(static_cast<std::size_t>(code.n));
    std::vector<int> yd(static_cast<std::size_t>(code.n));
    for (std::int64_t t = 0; t < trials; ++t) {
        const int k = static_cast<int>(gen() % static_cast<std::uint64_t>(code.k_size));
        long long si = 0;
        for (int i = 0; i < code.n; ++i) {
            sd[static_cast<std::size_t>(i)] = sample(p_s.p.data(), p_s.size());
            si = si * w.s_size + sd[static_cast<std::size_t>(i)];
        }
        const int m = code.state_enc[static_cast<std::size_t>(si)];
        const long long xi = code.chan_enc[static_cast<std::size_t>(k) * work.sn + si];
        const auto xd = digits_of(xi, w.x_size, code.n);
        long long yi = 0;
        for (int i = 0; i < code.n; ++i) {
            const double* row =
                &w.w[(static_cast<std::size_t>(sd[static_cast<std::size_t>(i)]) * w.x_size +
                      xd[static_cast<std::size_t>(i)]) *
                     w.y_size];
            yd[static_cast<std::size_t>(i)] = sample(row, w.y_size);
            yi = yi * w.y_size + yd[static_cast<std::size_t>(i)];
        }
        if (code.decoder[static_cast<std::size_t>(yi) * code.m_size + m] == k) ++hits;
    }
    McResult res;
    res.estimate = static_cast<double>(hits) / static_cast<double>(trials);
    res.std_error = std::sqrt(res.estimate * (1.0 - res.estimate) / static_cast<double>(trials));
    return res;
}

}  // namespace sdcexp
