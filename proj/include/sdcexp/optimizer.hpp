#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "sdcexp/probability.hpp"

namespace sdcexp {

struct OptConfig {
    int n_starts = 8;        // uniform start + (n_starts-1) seeded Dirichlet(1) starts
    int max_iters = 300;     // gradient iterations per start
    double step_init = 0.25;
    double tol = 1e-9;       // convergence threshold on objective improvement
    std::uint64_t seed = 20250810;
    double grid_step = 0.05;  // oracle mode only
    double mass_floor = 1e-12;
};

struct OptResult {
    Joint5 argmax;
    double value = 0.0;
    int iters_used = 0;
    bool converged = false;
};

// Feasible sets supported: the full joint simplex, optionally sliced by a
// fixed S-marginal, optionally with the kernel q_{Y|XS} pinned to a channel
// (the free variable is then q_{UVSX}, extended by W), optionally with a
// support mask forcing selected joint cells to zero.
struct Constraints {
    std::optional<Dist> s_marginal;
    std::optional<Channel> kernel;
    std::vector<std::uint8_t> joint_support;  // per joint cell, 1 = allowed; empty = all
};

// Objective over joints. Implementations may provide an analytic gradient
// with respect to the joint cells; otherwise the optimizer falls back to
// central differences on the free variable.
class JointObjective {
public:
    virtual ~JointObjective() = default;
    virtual double value(const Joint5& q) const = 0;
    virtual bool has_gradient() const { return false; }
    // Returns the value and fills grad (size = joint cells).
    virtual double value_and_grad(const Joint5& q, std::span<double> grad) const;
};

class FunctionObjective final : public JointObjective {
public:
    explicit FunctionObjective(std::function<double(const Joint5&)> f) : f_(std::move(f)) {}
    double value(const Joint5& q) const override { return f_(q); }

private:
    std::function<double(const Joint5&)> f_;
};

class OptimizerError : public std::runtime_error {
public:
    OptimizerError(const std::string& msg, std::vector<double> point)
        : std::runtime_error(msg), point_(std::move(point)) {}
    const std::vector<double>& point() const { return point_; }

private:
    std::vector<double> point_;
};

class GuardError : public std::runtime_error {
public:
    GuardError(const std::string& msg, double count)
        : std::runtime_error(msg), count_(count) {}
    double count() const { return count_; }

private:
    double count_;
};

// Multi-start projected ascent. extra_starts are deterministic feasible
// joints tried before the built-in starts; ties within tol keep the earliest
// start.
OptResult maximize_joint(const JointObjective& objective, Shape5 shape,
                         const Constraints& constraints, const OptConfig& cfg,
                         std::span<const Joint5> extra_starts = {});

// Exhaustive evaluation on a simplex grid with the given mass spacing.
// Refuses instances whose grid exceeds 1e8 points.
OptResult exhaustive_grid(const JointObjective& objective, Shape5 shape,
                          const Constraints& constraints, double grid_step);

double exhaustive_grid_size(Shape5 shape, const Constraints& constraints,
                            double grid_step);

}  // namespace sdcexp
