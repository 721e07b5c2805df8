#pragma once

#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "sdcexp/optimizer.hpp"
#include "sdcexp/probability.hpp"

namespace sdcexp {

struct TiltParams {
    double alpha = 1.0;
    double mu = 1.0;
    double lambda = 1.0;

    void validate() const;
};

struct ThetaParams {
    double alpha = 1.0;
    double mu = 1.0;
    double theta = 0.1;  // must lie in (0, 1/(2+2 mu))

    void validate() const;
};

struct RatePoint {
    double r_d = 0.0;  // decoder state-information rate, nats/use
    double r = 0.0;    // message rate, nats/use

    void validate() const;
};

// lambda = theta / (1 - 2(1+mu) theta) and its inverse.
TiltParams theta_to_lambda(const ThetaParams& tp);
ThetaParams lambda_to_theta(const TiltParams& tp);

// Per-cell tilted weight: alpha ln[W/q_{Y|XSUV}]
//   + ln[q_{Y|UV} q_{S|V} / (q_{S|UV} q_{Y|V})]
//   - mu ln[q_{S|V} q_Y / (q_{Y|V} q_S)].
// May be +-infinity when a ratio degenerates.
double omega_weight(const Joint5& q, const Channel& w, double alpha, double mu,
                    const std::array<int, 5>& cell);

// Log-moment of the tilted weight: ln E_q[exp(lambda omega)]. -infinity when
// no positive-mass cell has positive weight; +infinity is reported (never
// thrown) if the moment saturates.
double omega_q(const Joint5& q, const Channel& w, double alpha, double mu,
               double lambda);

// d/d lambda of omega_q at 0+, computed analytically:
// -alpha D(q_{Y|XSUV}||W|q_{UVSX}) + I(U;Y|V) - I(U;S|V) - mu[I(V;S)-I(V;Y)].
double omega_slope_at_zero(const Joint5& q, const Channel& w, double alpha,
                           double mu);

// max over joints with |U|,|V| <= |S|+|Y|-1 of omega_q.
double omega_W(const Channel& w, double alpha, double mu, double lambda,
               const OptConfig& cfg);

double f_of(const RatePoint& rate, const TiltParams& tp, double omega_w_value);

struct SearchSpec {
    int grid_points = 17;     // per axis, log-spaced
    double grid_lo = 1e-2;
    double grid_hi = 1e2;
    int refine_rounds = 2;
    int refine_points = 5;    // per axis in each refinement round
};

struct SurfaceEntry {
    TiltParams tp;
    double omega_w = 0.0;
    double f_value = 0.0;
};

struct FSupResult {
    double f = 0.0;                   // clamped at 0
    double f_unclamped = 0.0;
    TiltParams argmax;
    double omega_at_argmax = 0.0;
    bool clamped = false;
    std::vector<SurfaceEntry> evaluated;
};

// Shared search driver; caches omega_W values per (alpha, mu, lambda) so a
// parameter grid is paid for once per channel across many rate points.
class ExponentSolver {
public:
    ExponentSolver(Channel w, OptConfig cfg, int threads = 0);

    double omega(const TiltParams& tp);
    FSupResult f_sup(const RatePoint& rate, const SearchSpec& search = {});

    const Channel& channel() const { return w_; }
    const OptConfig& config() const { return cfg_; }
    std::size_t cache_size() const { return cache_.size(); }

private:
    void ensure(const std::vector<TiltParams>& tps);

    Channel w_;
    OptConfig cfg_;
    int threads_;
    std::map<std::array<std::uint64_t, 3>, double> cache_;
    std::map<std::uint64_t, Joint5> boot_cache_;  // per-mu ascent seeds
    std::mutex mutex_;
};

double f_sup(const Channel& w, const RatePoint& rate, const SearchSpec& search,
             const OptConfig& cfg);

struct PcBound {
    double raw = 0.0;     // 5 exp(-n F)
    double capped = 0.0;  // min(1, raw)
    double f = 0.0;
};

PcBound pc_upper_bound(const Channel& w, const RatePoint& rate, int n,
                       const SearchSpec& search, const OptConfig& cfg);

// Auxiliary alphabet size |S|+|Y|-1 used for the exponent's maximization.
int exponent_aux_size(const Channel& w);

// Objective used by omega_W; exposed so oracles and property tests can drive
// the same evaluation path directly.
class OmegaObjective final : public JointObjective {
public:
    OmegaObjective(Shape5 shape, const Channel& w, double alpha, double mu,
                   double lambda);
    ~OmegaObjective() override;
    double value(const Joint5& q) const override;
    bool has_gradient() const override { return true; }
    double value_and_grad(const Joint5& q, std::span<double> grad) const override;
    double slope_at_zero(const Joint5& q) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace sdcexp
