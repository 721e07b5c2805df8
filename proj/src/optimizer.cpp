#include "sdcexp/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "sdcexp/util.hpp"

namespace sdcexp {

double JointObjective::value_and_grad(const Joint5&, std::span<double>) const {
    throw std::logic_error("JointObjective: gradient not implemented");
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// The free variable is either the full joint or q_{UVSX} (kernel pinned),
// partitioned into per-state groups when the S-marginal is fixed.
struct FreeSpace {
    Shape5 shape;
    const Constraints* cons;
    bool has_kernel = false;
    int n_free = 0;
    std::vector<std::uint8_t> live;       // per free cell
    std::vector<int> group_of;            // per free cell
    std::vector<double> group_mass;
    std::vector<std::vector<int>> group_live;  // live free cells per group

    FreeSpace(Shape5 sh, const Constraints& c) : shape(sh), cons(&c) {
        has_kernel = c.kernel.has_value();
        if (has_kernel) {
            const Channel& w = *c.kernel;
            if (w.s_size != sh.s() || w.x_size != sh.x() || w.y_size != sh.y())
                throw std::invalid_argument("maximize_joint: kernel alphabets do not match shape");
        }
        if (c.s_marginal && c.s_marginal->size() != sh.s())
            throw std::invalid_argument("maximize_joint: S-marginal size does not match shape");
        if (!c.joint_support.empty() && c.joint_support.size() != sh.size())
            throw std::invalid_argument("maximize_joint: support mask size does not match shape");

        n_free = sh.u() * sh.v() * sh.s() * sh.x() * (has_kernel ? 1 : sh.y());
        live.assign(n_free, 1);
        group_of.assign(n_free, 0);

        const int n_groups = c.s_marginal ? sh.s() : 1;
        group_mass.assign(n_groups, 0.0);
        if (c.s_marginal)
            for (int s = 0; s < sh.s(); ++s) group_mass[s] = (*c.s_marginal)[s];
        else
            group_mass[0] = 1.0;

        int i = 0;
        for (int u = 0; u < sh.u(); ++u)
            for (int v = 0; v < sh.v(); ++v)
                for (int s = 0; s < sh.s(); ++s)
                    for (int x = 0; x < sh.x(); ++x) {
                        if (has_kernel) {
                            if (!c.joint_support.empty()) {
                                // A free cell dies if the mask kills a joint cell
                                // the kernel would populate.
                                for (int y = 0; y < sh.y(); ++y)
                                    if (!c.joint_support[shape.index({u, v, s, x, y})] &&
                                        (*c.kernel)(s, x, y) > 0.0)
                                        live[i] = 0;
                            }
                            group_of[i] = c.s_marginal ? s : 0;
                            ++i;
                        } else {
                            for (int y = 0; y < sh.y(); ++y) {
                                if (!c.joint_support.empty() &&
                                    !c.joint_support[shape.index({u, v, s, x, y})])
                                    live[i] = 0;
                                group_of[i] = c.s_marginal ? s : 0;
                                ++i;
                            }
                        }
                    }

        group_live.assign(n_groups, {});
        for (int k = 0; k < n_free; ++k)
            if (live[k]) group_live[group_of[k]].push_back(k);
        for (int g = 0; g < n_groups; ++g)
            if (group_live[g].empty() && group_mass[g] > 0.0)
                throw std::invalid_argument("maximize_joint: a constrained group has no feasible cells");
    }

    void lift(const double* z, Joint5& out) const {
        out.shape = shape;
        out.mass.resize(shape.size());
        if (!has_kernel) {
            std::copy(z, z + n_free, out.mass.begin());
            return;
        }
        const Channel& w = *cons->kernel;
        const int Y = shape.y();
        std::size_t idx = 0;
        int i = 0;
        for (int u = 0; u < shape.u(); ++u)
            for (int v = 0; v < shape.v(); ++v)
                for (int s = 0; s < shape.s(); ++s)
                    for (int x = 0; x < shape.x(); ++x, ++i)
                        for (int y = 0; y < Y; ++y) out.mass[idx++] = z[i] * w(s, x, y);
    }

    std::vector<double> restrict(const Joint5& q) const {
        std::vector<double> z(static_cast<std::size_t>(n_free), 0.0);
        if (!has_kernel) {
            for (int k = 0; k < n_free; ++k) z[k] = q.mass[k];
        } else {
            const int Y = shape.y();
            for (int k = 0; k < n_free; ++k) {
                double sum = 0.0;
                for (int y = 0; y < Y; ++y) sum += q.mass[static_cast<std::size_t>(k) * Y + y];
                z[k] = sum;
            }
        }
        return z;
    }

    // Chain rule from a joint-cell gradient to the free variable.
    void free_gradient(const std::vector<double>& joint_grad, std::vector<double>& out) const {
        out.assign(static_cast<std::size_t>(n_free), 0.0);
        if (!has_kernel) {
            for (int k = 0; k < n_free; ++k)
                if (live[k]) out[k] = joint_grad[k];
            return;
        }
        const Channel& w = *cons->kernel;
        const int Y = shape.y();
        int i = 0;
        for (int u = 0; u < shape.u(); ++u)
            for (int v = 0; v < shape.v(); ++v)
                for (int s = 0; s < shape.s(); ++s)
                    for (int x = 0; x < shape.x(); ++x, ++i) {
                        if (!live[i]) continue;
                        double g = 0.0;
                        for (int y = 0; y < Y; ++y) {
                            double wy = w(s, x, y);
                            if (wy > 0.0) g += wy * joint_grad[static_cast<std::size_t>(i) * Y + y];
                        }
                        out[i] = g;
                    }
    }
};

// Euclidean projection of v (restricted to idx) onto
// { x_i >= floor, sum x_i = total }.
void project_group(std::vector<double>& v, const std::vector<int>& idx, double total,
                   double floor, std::vector<double>& scratch) {
    const int n = static_cast<int>(idx.size());
    double t = total - floor * n;
    if (t < 0.0) {
        floor = 0.0;
        t = total;
    }
    scratch.resize(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) scratch[j] = v[idx[j]] - floor;
    std::vector<double> sorted(scratch);
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double cum = 0.0, tau = 0.0;
    int rho = 0;
    for (int j = 0; j < n; ++j) {
        cum += sorted[j];
        double cand = (t - cum) / (j + 1);
        if (sorted[j] + cand > 0.0) {
            rho = j + 1;
            tau = cand;
        }
    }
    if (rho == 0) {  // all mass on the largest coordinate
        tau = t - sorted[0];
        for (int j = 0; j < n; ++j) v[idx[j]] = floor;
        int best = 0;
        for (int j = 1; j < n; ++j)
            if (scratch[j] > scratch[best]) best = j;
        v[idx[best]] = floor + t;
        return;
    }
    for (int j = 0; j < n; ++j) v[idx[j]] = floor + std::max(scratch[j] + tau, 0.0);
}

class Evaluator {
public:
    Evaluator(const JointObjective& obj, const FreeSpace& fs) : obj_(obj), fs_(fs) {
        scratch_.shape = fs.shape;
        scratch_.mass.resize(fs.shape.size());
    }

    double eval(const std::vector<double>& z) {
        fs_.lift(z.data(), scratch_);
        double f = obj_.value(scratch_);
        if (std::isnan(f))
            throw OptimizerError("objective returned NaN at a feasible point", z);
        return f;
    }

    // Gradient on the free variable; analytic when available, otherwise
    // central differences (one-sided next to the nonnegativity boundary).
    double gradient(const std::vector<double>& z, std::vector<double>& g) {
        if (obj_.has_gradient()) {
            fs_.lift(z.data(), scratch_);
            joint_grad_.resize(fs_.shape.size());
            double f = obj_.value_and_grad(scratch_, joint_grad_);
            if (std::isnan(f))
                throw OptimizerError("objective returned NaN at a feasible point", z);
            fs_.free_gradient(joint_grad_, g);
            return f;
        }
        const double h = 1e-6;
        g.assign(z.size(), 0.0);
        std::vector<double> zp = z;
        for (int i = 0; i < fs_.n_free; ++i) {
            if (!fs_.live[i]) continue;
            const double zi = z[i];
            const double hm = std::min(h, zi);
            zp[i] = zi + h;
            double fp = eval(zp);
            zp[i] = zi - hm;
            double fm = eval(zp);
            zp[i] = zi;
            if (std::isfinite(fp) && std::isfinite(fm))
                g[i] = (fp - fm) / (h + hm);
        }
        return eval(z);
    }

    Joint5 take_joint(const std::vector<double>& z) {
        Joint5 out;
        fs_.lift(z.data(), out);
        return out;
    }

private:
    const JointObjective& obj_;
    const FreeSpace& fs_;
    Joint5 scratch_;
    std::vector<double> joint_grad_;
};

struct StartResult {
    std::vector<double> z;
    double value = -kInf;
    int iters = 0;
    bool converged = false;
};

StartResult ascend(Evaluator& ev, const FreeSpace& fs, std::vector<double> z,
                   const OptConfig& cfg) {
    StartResult res;
    double f = ev.eval(z);
    double step = cfg.step_init;
    std::vector<double> grad, cand;
    int iters = 0;
    bool converged = false;
    while (iters < cfg.max_iters) {
        if (f == kInf) break;  // saturated; cannot improve
        if (f == -kInf) break; // degenerate start; leave it to other starts
        ev.gradient(z, grad);
        ++iters;
        bool improved = false;
        double gain = 0.0;
        while (step >= 1e-14) {
            cand = z;
            for (std::size_t i = 0; i < cand.size(); ++i) cand[i] += step * grad[i];
            std::vector<double> scratch;
            for (std::size_t g = 0; g < fs.group_live.size(); ++g)
                project_group(cand, fs.group_live[g], fs.group_mass[g], cfg.mass_floor, scratch);
            double fc = ev.eval(cand);
            if (fc > f) {
                gain = fc - f;
                z.swap(cand);
                f = fc;
                step = std::min(step * 1.6, 4.0);
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if (!improved || gain < cfg.tol) {
            converged = true;
            break;
        }
    }
    res.z = std::move(z);
    res.value = f;
    res.iters = iters;
    res.converged = converged;
    return res;
}

std::vector<double> make_start(const FreeSpace& fs, int start_idx, const OptConfig& cfg) {
    std::vector<double> z(static_cast<std::size_t>(fs.n_free), 0.0);
    for (std::size_t g = 0; g < fs.group_live.size(); ++g) {
        const auto& idx = fs.group_live[g];
        const int n = static_cast<int>(idx.size());
        double t = fs.group_mass[g] - cfg.mass_floor * n;
        double floor = cfg.mass_floor;
        if (t < 0.0) {
            floor = 0.0;
            t = fs.group_mass[g];
        }
        if (start_idx == 0) {
            for (int j = 0; j < n; ++j) z[idx[j]] = floor + t / n;
        } else {
            std::mt19937_64 gen(mix_seed(cfg.seed, static_cast<std::uint64_t>(start_idx) * 1000003ULL + g));
            std::vector<double> e(static_cast<std::size_t>(n));
            double sum = 0.0;
            for (int j = 0; j < n; ++j) {
                e[j] = exponential1(gen);
                sum += e[j];
            }
            for (int j = 0; j < n; ++j) z[idx[j]] = floor + t * e[j] / sum;
        }
    }
    return z;
}

}  // namespace

OptResult maximize_joint(const JointObjective& objective, Shape5 shape,
                         const Constraints& constraints, const OptConfig& cfg,
                         std::span<const Joint5> extra_starts) {
    if (cfg.n_starts < 1 || cfg.max_iters < 1 || !(cfg.tol > 0.0) || !(cfg.step_init > 0.0))
        throw std::invalid_argument("OptConfig: n_starts, max_iters >= 1 and tol, step_init > 0 required");
    FreeSpace fs(shape, constraints);
    Evaluator ev(objective, fs);

    std::vector<std::vector<double>> starts;
    std::vector<double> scratch;
    for (const Joint5& q : extra_starts) {
        if (q.shape != shape)
            throw std::invalid_argument("maximize_joint: extra start shape mismatch");
        std::vector<double> z = fs.restrict(q);
        for (std::size_t g = 0; g < fs.group_live.size(); ++g)
            project_group(z, fs.group_live[g], fs.group_mass[g], cfg.mass_floor, scratch);
        for (int k = 0; k < fs.n_free; ++k)
            if (!fs.live[k]) z[k] = 0.0;
        starts.push_back(std::move(z));
    }
    for (int s = 0; s < cfg.n_starts; ++s) starts.push_back(make_start(fs, s, cfg));

    OptResult best;
    best.value = -kInf;
    int total_iters = 0;
    bool have = false;
    for (const auto& z0 : starts) {
        StartResult r = ascend(ev, fs, z0, cfg);
        total_iters += r.iters;
        if (!have || r.value > best.value + cfg.tol) {
            best.argmax = ev.take_joint(r.z);
            best.value = r.value;
            best.converged = r.converged;
            have = true;
        }
        if (best.value == kInf) break;
    }
    best.iters_used = total_iters;
    return best;
}

double exhaustive_grid_size(Shape5 shape, const Constraints& constraints, double grid_step) {
    if (!(grid_step > 0.0)) throw std::invalid_argument("exhaustive_grid: grid_step must be > 0");
    FreeSpace fs(shape, constraints);
    double total = 1.0;
    for (std::size_t g = 0; g < fs.group_live.size(); ++g) {
        const int n = static_cast<int>(fs.group_live[g].size());
        const long long m = std::max(1LL, std::llround(fs.group_mass[g] / grid_step));
        // C(m + n - 1, n - 1)
        double c = 1.0;
        for (long long j = 1; j < n; ++j) c *= static_cast<double>(m + j) / static_cast<double>(j);
        total *= c;
        if (total > 1e18) return total;
    }
    return total;
}

namespace {

struct GridState {
    const FreeSpace& fs;
    Evaluator& ev;
    std::vector<double> z;
    std::vector<long long> units;  // per group
    std::vector<double> unit_size;
    double best_value = -kInf;
    std::vector<double> best_z;
    long long evaluated = 0;
    bool have = false;

    void run_group(std::size_t g) {
        if (g == fs.group_live.size()) {
            double f = ev.eval(z);
            ++evaluated;
            if (!have || f > best_value) {
                best_value = f;
                best_z = z;
                have = true;
            }
            return;
        }
        fill_cells(g, 0, units[g]);
    }

    void fill_cells(std::size_t g, std::size_t cell_pos, long long remaining) {
        const auto& idx = fs.group_live[g];
        if (cell_pos + 1 == idx.size()) {
            z[idx[cell_pos]] = remaining * unit_size[g];
            run_group(g + 1);
            return;
        }
        for (long long k = remaining; k >= 0; --k) {
            z[idx[cell_pos]] = k * unit_size[g];
            fill_cells(g, cell_pos + 1, remaining - k);
        }
    }
};

}  // namespace

OptResult exhaustive_grid(const JointObjective& objective, Shape5 shape,
                          const Constraints& constraints, double grid_step) {
    const double count = exhaustive_grid_size(shape, constraints, grid_step);
    if (count > 1e8)
        throw GuardError("exhaustive_grid: feasible grid has " + std::to_string(count) +
                             " points, exceeding the 1e8 guard",
                         count);
    FreeSpace fs(shape, constraints);
    Evaluator ev(objective, fs);
    GridState gs{fs, ev, std::vector<double>(static_cast<std::size_t>(fs.n_free), 0.0),
                 {}, {}, -std::numeric_limits<double>::infinity(), {}, 0, false};
    for (std::size_t g = 0; g < fs.group_live.size(); ++g) {
        long long m = std::max(1LL, std::llround(fs.group_mass[g] / grid_step));
        gs.units.push_back(m);
        gs.unit_size.push_back(fs.group_mass[g] / static_cast<double>(m));
    }
    gs.run_group(0);
    OptResult res;
    res.argmax = ev.take_joint(gs.best_z);
    res.value = gs.best_value;
    res.iters_used = static_cast<int>(std::min<long long>(gs.evaluated, 1LL << 30));
    res.converged = true;
    return res;
}

}  // namespace sdcexp
