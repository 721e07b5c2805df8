#pragma once

#include <utility>
#include <vector>

#include "sdcexp/exponent.hpp"
#include "sdcexp/optimizer.hpp"
#include "sdcexp/probability.hpp"

namespace sdcexp {

// Support-function samples (mu, C^(mu)); the region is carved out by the
// constraints R <= mu R_d + C^(mu).
struct SupportCurve {
    std::vector<std::pair<double, double>> entries;  // mu strictly increasing

    // Boundary trace C(R_d) = min over entries of mu R_d + c_mu.
    double value_at(double r_d) const;
    void validate() const;
};

enum class Membership { inside, outside, boundary };

// I(U;Y|V) - I(U;S|V) - mu [I(V;S) - I(V;Y)].
double gp_tradeoff_objective(const Joint5& p, double mu);

// Auxiliary sizes from the support lemmas.
struct RegionAlphabets {
    int u_size;
    int v_size;
};
RegionAlphabets region_aux_sizes(const Channel& w);

// C^(mu)(W): maximize the tradeoff objective over joints with q_{Y|XS} = W.
// By default the S-marginal is pinned to the physical state source; pass
// pin_state = false for the literal reading that leaves it free.
double c_mu(const Channel& w, const Dist& p_s, double mu, const OptConfig& cfg,
            bool pin_state = true);

// C~(alpha,mu)(W): maximize -alpha D(q_{Y|XSUV}||W|q_{UVSX}) + tradeoff over
// unconstrained joints with |U|,|V| <= |S|+|Y|-1.
double c_tilde(const Channel& w, double alpha, double mu, const OptConfig& cfg);

// Value of the c_tilde objective at a specific joint.
double c_tilde_objective(const Joint5& q, const Channel& w, double alpha, double mu);

SupportCurve boundary(const Channel& w, const Dist& p_s,
                      const std::vector<double>& mu_grid, const OptConfig& cfg,
                      bool pin_state = true, int threads = 0);

Membership membership(const SupportCurve& curve, const RatePoint& pt,
                      double tol = 1e-6);

// min over entries of (mu r_d + c_mu - r); positive inside, negative outside.
double signed_slack(const SupportCurve& curve, const RatePoint& pt);

// Gel'fand-Pinsker capacity C_SDC(0,0|W) = max I(U;Y) - I(U;S) with
// |U| = |S||X|+1 and the state source pinned.
double gp_capacity(const Channel& w, const Dist& p_s, const OptConfig& cfg);

// Kernel-consistent maximizer of the tradeoff objective with the state
// marginal left free, padded to the target shape; used as an ascent seed for
// the exponent's log-moment search.
Joint5 tradeoff_seed(const Channel& w, double mu, const OptConfig& cfg, Shape5 target);

// Objectives exposed so oracles can drive the same evaluation path.
class GpTradeoffObjective final : public JointObjective {
public:
    GpTradeoffObjective(Shape5 shape, double mu);
    ~GpTradeoffObjective() override;
    double value(const Joint5& q) const override;
    bool has_gradient() const override { return true; }
    double value_and_grad(const Joint5& q, std::span<double> grad) const override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

class CTildeObjective final : public JointObjective {
public:
    CTildeObjective(Shape5 shape, const Channel& w, double alpha, double mu);
    ~CTildeObjective() override;
    double value(const Joint5& q) const override;
    bool has_gradient() const override { return true; }
    double value_and_grad(const Joint5& q, std::span<double> grad) const override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace sdcexp
