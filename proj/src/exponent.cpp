#include "sdcexp/exponent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sdcexp/detail/joint_stats.hpp"
#include "sdcexp/region.hpp"
#include "sdcexp/detail/parallel.hpp"
#include "sdcexp/util.hpp"

namespace sdcexp {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void TiltParams::validate() const {
    if (!(alpha > 0.0) || !(mu > 0.0) || !(lambda > 0.0))
        throw std::invalid_argument("TiltParams: alpha, mu, lambda must be > 0");
}

void ThetaParams::validate() const {
    if (!(alpha > 0.0) || !(mu > 0.0))
        throw std::invalid_argument("ThetaParams: alpha, mu must be > 0");
    if (!(theta > 0.0) || !(theta < 1.0 / (2.0 + 2.0 * mu)))
        throw std::invalid_argument("ThetaParams: theta must lie in (0, 1/(2+2mu))");
}

void RatePoint::validate() const {
    if (!(r_d >= 0.0) || !(r >= 0.0))
        throw std::invalid_argument("RatePoint: rates must be >= 0");
}

TiltParams theta_to_lambda(const ThetaParams& tp) {
    tp.validate();
    return TiltParams{tp.alpha, tp.mu, tp.theta / (1.0 - 2.0 * (1.0 + tp.mu) * tp.theta)};
}

ThetaParams lambda_to_theta(const TiltParams& tp) {
    tp.validate();
    return ThetaParams{tp.alpha, tp.mu, tp.lambda / (1.0 + 2.0 * (1.0 + tp.mu) * tp.lambda)};
}

int exponent_aux_size(const Channel& w) { return w.s_size + w.y_size - 1; }

struct OmegaObjective::Impl {
    Shape5 sh;
    double alpha, mu, lambda;
    std::vector<double> lw;  // ln W per (s,x,y)
    mutable detail::JointStats stats;
    mutable std::vector<double> ell;  // per cell: ln q + lambda omega
    mutable std::vector<double> t4, tuvy, tuvs, tvs, tvy, ts, ty;

    Impl(Shape5 shape, const Channel& w, double a, double m, double l)
        : sh(shape), alpha(a), mu(m), lambda(l), stats(shape) {
        if (w.s_size != sh.s() || w.x_size != sh.x() || w.y_size != sh.y())
            throw std::invalid_argument("OmegaObjective: channel does not match shape");
        lw.resize(w.w.size());
        for (std::size_t i = 0; i < lw.size(); ++i) lw[i] = detail::xlog(w.w[i]);
        ell.resize(sh.size());
    }

    // Fills ell and returns the running maximum; -inf when no cell
    // contributes.
    double fill_ell(const double* q) const {
        stats.accumulate(q);
        stats.log_tables();
        const int U = sh.u(), V = sh.v(), S = sh.s(), X = sh.x(), Y = sh.y();
        double lmax = -kInf;
        std::size_t idx = 0;
        for (int u = 0; u < U; ++u)
            for (int v = 0; v < V; ++v)
                for (int s = 0; s < S; ++s)
                    for (int x = 0; x < X; ++x) {
                        const std::size_t i4 = ((static_cast<std::size_t>(u) * V + v) * S + s) * X + x;
                        const std::size_t iuv = static_cast<std::size_t>(u) * V + v;
                        const std::size_t ivs = static_cast<std::size_t>(v) * S + s;
                        const double base_mid = stats.lmvs[ivs] - stats.lmuvs[iuv * S + s];
                        for (int y = 0; y < Y; ++y, ++idx) {
                            const double m = q[idx];
                            if (!(m > 0.0)) {
                                ell[idx] = -kInf;
                                continue;
                            }
                            const double lq = std::log(m);
                            const std::size_t ivy = static_cast<std::size_t>(v) * Y + y;
                            const double omega =
                                alpha * (lw[(static_cast<std::size_t>(s) * X + x) * Y + y] - lq +
                                         stats.lm4[i4]) +
                                (stats.lmuvy[iuv * Y + y] + base_mid - stats.lmvy[ivy]) -
                                mu * (stats.lmvs[ivs] + stats.lmy[y] - stats.lmvy[ivy] -
                                      stats.lms[s]);
                            const double e = lq + lambda * omega;
                            ell[idx] = e;
                            if (e > lmax) lmax = e;
                        }
                    }
        return lmax;
    }

    double value(const double* q) const {
        const double lmax = fill_ell(q);
        if (lmax == -kInf) return -kInf;
        if (lmax == kInf) return kInf;
        double sum = 0.0;
        for (double e : ell)
            if (e > -kInf) sum += std::exp(e - lmax);
        return lmax + std::log(sum);
    }

    double value_and_grad(const double* q, std::span<double> grad) const {
        const double lmax = fill_ell(q);
        std::fill(grad.begin(), grad.end(), 0.0);
        if (!std::isfinite(lmax)) return lmax;

        t4.assign(stats.m4.size(), 0.0);
        tuvy.assign(stats.muvy.size(), 0.0);
        tuvs.assign(stats.muvs.size(), 0.0);
        tvs.assign(stats.mvs.size(), 0.0);
        tvy.assign(stats.mvy.size(), 0.0);
        ts.assign(stats.ms.size(), 0.0);
        ty.assign(stats.my.size(), 0.0);

        const int U = sh.u(), V = sh.v(), S = sh.s(), X = sh.x(), Y = sh.y();
        double norm = 0.0;
        std::size_t idx = 0;
        for (int u = 0; u < U; ++u)
            for (int v = 0; v < V; ++v)
                for (int s = 0; s < S; ++s)
                    for (int x = 0; x < X; ++x) {
                        const std::size_t i4 = ((static_cast<std::size_t>(u) * V + v) * S + s) * X + x;
                        const std::size_t iuv = static_cast<std::size_t>(u) * V + v;
                        double row = 0.0;
                        for (int y = 0; y < Y; ++y, ++idx) {
                            const double e = ell[idx];
                            if (e == -kInf) continue;
                            const double t = std::exp(e - lmax);
                            norm += t;
                            row += t;
                            tuvy[iuv * Y + y] += t;
                            tvy[static_cast<std::size_t>(v) * Y + y] += t;
                            ty[static_cast<std::size_t>(y)] += t;
                        }
                        t4[i4] = row;
                        tuvs[iuv * S + s] += row;
                        tvs[static_cast<std::size_t>(v) * S + s] += row;
                        ts[static_cast<std::size_t>(s)] += row;
                    }

        idx = 0;
        for (int u = 0; u < U; ++u)
            for (int v = 0; v < V; ++v)
                for (int s = 0; s < S; ++s)
                    for (int x = 0; x < X; ++x) {
                        const std::size_t i4 = ((static_cast<std::size_t>(u) * V + v) * S + s) * X + x;
                        const std::size_t iuv = static_cast<std::size_t>(u) * V + v;
                        const std::size_t ivs = static_cast<std::size_t>(v) * S + s;
                        for (int y = 0; y < Y; ++y, ++idx) {
                            const double m = q[idx];
                            if (!(m > 0.0)) continue;
                            const std::size_t ivy = static_cast<std::size_t>(v) * Y + y;
                            const double t = (ell[idx] == -kInf) ? 0.0 : std::exp(ell[idx] - lmax);
                            double g = t / m * (1.0 - lambda * alpha);
                            g += lambda *
                                 (alpha * t4[i4] / stats.m4[i4] +
                                  tuvy[iuv * Y + y] / stats.muvy[iuv * Y + y] -
                                  tuvs[iuv * S + s] / stats.muvs[iuv * S + s] +
                                  (1.0 - mu) * tvs[ivs] / stats.mvs[ivs] +
                                  (mu - 1.0) * tvy[ivy] / stats.mvy[ivy] +
                                  mu * ts[s] / stats.ms[s] - mu * ty[y] / stats.my[y]);
                            grad[idx] = g / norm;
                        }
                    }
        return lmax + std::log(norm);
    }

    double slope(const double* q) const {
        stats.accumulate(q);
        stats.log_tables();
        const int U = sh.u(), V = sh.v(), S = sh.s(), X = sh.x(), Y = sh.y();
        double total = 0.0;
        std::size_t idx = 0;
        for (int u = 0; u < U; ++u)
            for (int v = 0; v < V; ++v)
                for (int s = 0; s < S; ++s)
                    for (int x = 0; x < X; ++x) {
                        const std::size_t i4 = ((static_cast<std::size_t>(u) * V + v) * S + s) * X + x;
                        const std::size_t iuv = static_cast<std::size_t>(u) * V + v;
                        const std::size_t ivs = static_cast<std::size_t>(v) * S + s;
                        for (int y = 0; y < Y; ++y, ++idx) {
                            const double m = q[idx];
                            if (!(m > 0.0)) continue;
                            const std::size_t ivy = static_cast<std::size_t>(v) * Y + y;
                            const double omega =
                                alpha * (lw[(static_cast<std::size_t>(s) * X + x) * Y + y] -
                                         std::log(m) + stats.lm4[i4]) +
                                (stats.lmuvy[iuv * Y + y] + stats.lmvs[ivs] -
                                 stats.lmuvs[iuv * S + s] - stats.lmvy[ivy]) -
                                mu * (stats.lmvs[ivs] + stats.lmy[y] - stats.lmvy[ivy] -
                                      stats.lms[s]);
                            if (omega == -kInf) return -kInf;
                            total += m * omega;
                        }
                    }
        return total;
    }
};

OmegaObjective::OmegaObjective(Shape5 shape, const Channel& w, double alpha, double mu,
                               double lambda)
    : impl_(std::make_unique<Impl>(shape, w, alpha, mu, lambda)) {}

OmegaObjective::~OmegaObjective() = default;

double OmegaObjective::value(const Joint5& q) const { return impl_->value(q.mass.data()); }

double OmegaObjective::value_and_grad(const Joint5& q, std::span<double> grad) const {
    return impl_->value_and_grad(q.mass.data(), grad);
}

double OmegaObjective::slope_at_zero(const Joint5& q) const {
    return impl_->slope(q.mass.data());
}

double omega_weight(const Joint5& q, const Channel& w, double alpha, double mu,
                    const std::array<int, 5>& cell) {
    if (!(alpha > 0.0) || !(mu > 0.0))
        throw std::invalid_argument("omega_weight: alpha, mu must be > 0");
    const auto& sh = q.shape;
    if (sh.s() != w.s_size || sh.x() != w.x_size || sh.y() != w.y_size)
        throw std::invalid_argument("omega_weight: channel does not match joint");
    for (int a = 0; a < 5; ++a)
        if (cell[a] < 0 || cell[a] >= sh.dim[a])
            throw std::invalid_argument("omega_weight: cell out of range");

    detail::JointStats stats(sh);
    stats.accumulate(q.mass.data());
    const int u = cell[0], v = cell[1], s = cell[2], x = cell[3], y = cell[4];
    const int V = sh.v(), S = sh.s(), X = sh.x(), Y = sh.y();
    const std::size_t i4 = ((static_cast<std::size_t>(u) * V + v) * S + s) * X + x;
    const std::size_t iuv = static_cast<std::size_t>(u) * V + v;

    // Conditioning marginals must carry mass for the conditionals to exist.
    double muv = 0.0;
    for (int ss = 0; ss < S; ++ss) muv += stats.muvs[iuv * S + ss];
    double mv = 0.0;
    for (int ss = 0; ss < S; ++ss) mv += stats.mvs[static_cast<std::size_t>(v) * S + ss];
    const double mcell = q.mass[sh.index(cell)];
    if (!(stats.m4[i4] > 0.0) || !(muv > 0.0) || !(mv > 0.0)) {
        if (mcell > 0.0)
            throw std::domain_error("omega_weight: conditional undefined at a positive-mass cell");
        throw std::domain_error("omega_weight: conditioning marginal has zero mass at the cell");
    }

    const double q_y_given_xsuv = mcell / stats.m4[i4];
    const double q_y_given_uv = stats.muvy[iuv * Y + y] / muv;
    const double q_s_given_uv = stats.muvs[iuv * S + s] / muv;
    const double q_s_given_v = stats.mvs[static_cast<std::size_t>(v) * S + s] / mv;
    const double q_y_given_v = stats.mvy[static_cast<std::size_t>(v) * Y + y] / mv;

    const double term_a = alpha * (detail::xlog(w(s, x, y)) - detail::xlog(q_y_given_xsuv));
    const double term_mid = detail::xlog(q_y_given_uv) + detail::xlog(q_s_given_v) -
                            detail::xlog(q_s_given_uv) - detail::xlog(q_y_given_v);
    const double term_mu = mu * (detail::xlog(q_s_given_v) + detail::xlog(stats.my[y]) -
                                 detail::xlog(q_y_given_v) - detail::xlog(stats.ms[s]));
    return term_a + term_mid - term_mu;
}

double omega_q(const Joint5& q, const Channel& w, double alpha, double mu, double lambda) {
    if (!(alpha > 0.0) || !(mu > 0.0) || !(lambda > 0.0))
        throw std::invalid_argument("omega_q: alpha, mu, lambda must be > 0");
    OmegaObjective obj(q.shape, w, alpha, mu, lambda);
    return obj.value(q);
}

double omega_slope_at_zero(const Joint5& q, const Channel& w, double alpha, double mu) {
    if (!(alpha > 0.0) || !(mu > 0.0))
        throw std::invalid_argument("omega_slope_at_zero: alpha, mu must be > 0");
    OmegaObjective obj(q.shape, w, alpha, mu, 1.0);
    return obj.slope_at_zero(q);
}

namespace {

Joint5 channel_consistent_zero_point(const Channel& w, Shape5 sh) {
    return Joint5::independent(Dist::uniform(sh.u()), Dist::uniform(sh.v()),
                               Dist::uniform(sh.s()), Dist::uniform(sh.x()), w);
}

// Kernel-consistent maximizer of the rate-tradeoff objective. Its slope at
// lambda -> 0 is the hyperplane value C^(mu), so ascending the log-moment from
// it keeps omega_W >= lambda C^(mu); without this floor an under-converged
// grid cell can report a spuriously positive exponent inside the region.
Joint5 gp_bootstrap_start(const Channel& w, double mu, const OptConfig& cfg, Shape5 target) {
    OptConfig boot = cfg;
    boot.seed = mix_seed(cfg.seed, 0x6b00u);
    return tradeoff_seed(w, mu, boot, target);
}

double omega_W_impl(const Channel& w, double alpha, double mu, double lambda,
                    const OptConfig& cfg, std::span<const Joint5> extra_starts) {
    const int aux = exponent_aux_size(w);
    Shape5 sh(aux, aux, w.s_size, w.x_size, w.y_size);
    OmegaObjective obj(sh, w, alpha, mu, lambda);
    OptResult res = maximize_joint(obj, sh, Constraints{}, cfg, extra_starts);
    return res.value;
}

}  // namespace

double omega_W(const Channel& w, double alpha, double mu, double lambda,
               const OptConfig& cfg) {
    const int aux = exponent_aux_size(w);
    Shape5 sh(aux, aux, w.s_size, w.x_size, w.y_size);
    // The channel-consistent independent joint has zero weight everywhere, so
    // ascent from it pins the result at >= 0.
    const std::vector<Joint5> starts{channel_consistent_zero_point(w, sh),
                                     gp_bootstrap_start(w, mu, cfg, sh)};
    return omega_W_impl(w, alpha, mu, lambda, cfg, starts);
}

double f_of(const RatePoint& rate, const TiltParams& tp, double omega_w_value) {
    rate.validate();
    tp.validate();
    if (omega_w_value == kInf) return -kInf;
    return (tp.lambda * (rate.r - tp.mu * rate.r_d) - omega_w_value) /
           (1.0 + tp.lambda * (4.0 + tp.alpha + 3.0 * tp.mu));
}

ExponentSolver::ExponentSolver(Channel w, OptConfig cfg, int threads)
    : w_(std::move(w)), cfg_(cfg), threads_(threads) {
    w_.validate();
}

double ExponentSolver::omega(const TiltParams& tp) {
    tp.validate();
    const std::array<std::uint64_t, 3> key{double_bits(tp.alpha), double_bits(tp.mu),
                                           double_bits(tp.lambda)};
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
    }
    OptConfig c = cfg_;
    c.seed = mix_seed(mix_seed(cfg_.seed, key[0]), mix_seed(key[1], key[2]));

    const int aux = exponent_aux_size(w_);
    Shape5 sh(aux, aux, w_.s_size, w_.x_size, w_.y_size);
    std::vector<Joint5> starts;
    starts.push_back(channel_consistent_zero_point(w_, sh));
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = boot_cache_.find(key[1]);
        if (it != boot_cache_.end()) starts.push_back(it->second);
    }
    if (starts.size() == 1) {
        OptConfig bc = cfg_;
        bc.seed = mix_seed(cfg_.seed, key[1]);
        Joint5 boot = gp_bootstrap_start(w_, tp.mu, bc, sh);
        {
            std::lock_guard<std::mutex> lock(mutex_);
            boot_cache_.emplace(key[1], boot);
        }
        starts.push_back(std::move(boot));
    }

    const double val = omega_W_impl(w_, tp.alpha, tp.mu, tp.lambda, c, starts);
    std::lock_guard<std::mutex> lock(mutex_);
    cache_.emplace(key, val);
    return val;
}

void ExponentSolver::ensure(const std::vector<TiltParams>& tps) {
    std::vector<TiltParams> missing;
    {
        std::lock_guard<std::mutex> lock(mutex_);
        for (const auto& tp : tps) {
            const std::array<std::uint64_t, 3> key{double_bits(tp.alpha), double_bits(tp.mu),
                                                   double_bits(tp.lambda)};
            if (cache_.find(key) == cache_.end()) missing.push_back(tp);
        }
    }
    detail::parallel_for(static_cast<int>(missing.size()), threads_,
                         [&](int i) { (void)omega(missing[static_cast<std::size_t>(i)]); });
}

FSupResult ExponentSolver::f_sup(const RatePoint& rate, const SearchSpec& search) {
    rate.validate();
    if (search.grid_points < 1)
        throw std::invalid_argument("f_sup: search grid must be nonempty");

    FSupResult out;
    bool have = false;

    auto run_batch = [&](const std::vector<double>& as, const std::vector<double>& ms,
                         const std::vector<double>& ls) {
        std::vector<TiltParams> tps;
        tps.reserve(as.size() * ms.size() * ls.size());
        for (double a : as)
            for (double m : ms)
                for (double l : ls) tps.push_back(TiltParams{a, m, l});
        ensure(tps);
        for (const auto& tp : tps) {
            const double om = omega(tp);
            const double f = f_of(rate, tp, om);
            out.evaluated.push_back(SurfaceEntry{tp, om, f});
            if (!have || f > out.f_unclamped) {
                out.f_unclamped = f;
                out.argmax = tp;
                out.omega_at_argmax = om;
                have = true;
            }
        }
    };

    run_batch(log_grid(search.grid_lo, search.grid_hi, search.grid_points),
              log_grid(search.grid_lo, search.grid_hi, search.grid_points),
              log_grid(search.grid_lo, search.grid_hi, search.grid_points));

    double ratio = search.grid_points > 1
                       ? std::pow(search.grid_hi / search.grid_lo,
                                  1.0 / (search.grid_points - 1))
                       : 4.0;
    for (int round = 0; round < search.refine_rounds; ++round) {
        const TiltParams inc = out.argmax;
        auto local = [&](double center) {
            return log_grid(center / ratio, center * ratio, search.refine_points);
        };
        run_batch(local(inc.alpha), local(inc.mu), local(inc.lambda));
        ratio = std::pow(ratio, 2.0 / std::max(1, search.refine_points - 1));
    }

    // sup over an open parameter set whose lambda -> 0 edge is 0, so the
    // reported value is never negative; the clamp is recorded.
    if (out.f_unclamped < 0.0) {
        out.f = 0.0;
        out.clamped = true;
    } else {
        out.f = out.f_unclamped;
    }
    return out;
}

double f_sup(const Channel& w, const RatePoint& rate, const SearchSpec& search,
             const OptConfig& cfg) {
    ExponentSolver solver(w, cfg);
    return solver.f_sup(rate, search).f;
}

PcBound pc_upper_bound(const Channel& w, const RatePoint& rate, int n,
                       const SearchSpec& search, const OptConfig& cfg) {
    if (n < 1) throw std::invalid_argument("pc_upper_bound: n must be >= 1");
    PcBound b;
    b.f = f_sup(w, rate, search, cfg);
    b.raw = 5.0 * std::exp(-static_cast<double>(n) * b.f);
    b.capped = std::min(1.0, b.raw);
    return b;
}

}  // namespace sdcexp
