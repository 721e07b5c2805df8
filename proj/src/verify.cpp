#include "sdcexp/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "sdcexp/oracle.hpp"
#include "sdcexp/util.hpp"

namespace sdcexp {

Joint5 random_interior_joint(Shape5 shape, std::uint64_t seed) {
    std::mt19937_64 gen(mix_seed(seed));
    std::vector<double> m(shape.size());
    double sum = 0.0;
    for (double& v : m) {
        v = 0.02 + exponential1(gen);
        sum += v;
    }
    for (double& v : m) v /= sum;
    Joint5 q;
    q.shape = shape;
    q.mass = std::move(m);
    return q;
}

Joint5 random_supported_joint(Shape5 shape, const Channel& w, std::uint64_t seed) {
    if (shape.s() != w.s_size || shape.x() != w.x_size || shape.y() != w.y_size)
        throw std::invalid_argument("random_supported_joint: channel does not match shape");
    std::mt19937_64 gen(mix_seed(seed));
    std::vector<double> m(shape.size(), 0.0);
    double sum = 0.0;
    std::size_t idx = 0;
    for (int u = 0; u < shape.u(); ++u)
        for (int v = 0; v < shape.v(); ++v)
            for (int s = 0; s < shape.s(); ++s)
                for (int x = 0; x < shape.x(); ++x)
                    for (int y = 0; y < shape.y(); ++y, ++idx) {
                        const double draw = 0.02 + exponential1(gen);
                        if (w(s, x, y) > 0.0) {
                            m[idx] = draw;
                            sum += draw;
                        }
                    }
    for (double& v : m) v /= sum;
    Joint5 q;
    q.shape = shape;
    q.mass = std::move(m);
    return q;
}

namespace {

PropertyResult make(const std::string& name, bool pass, double slack,
                    const std::string& detail) {
    PropertyResult r;
    r.name = name;
    r.status = pass ? PropertyResult::Status::pass : PropertyResult::Status::fail;
    r.slack = slack;
    r.detail = detail;
    return r;
}

std::vector<double> default_lambda_grid() {
    std::vector<double> g;
    for (int i = 0; i < 9; ++i) g.push_back(0.05 + 0.05 * i);
    return g;
}

}  // namespace

std::vector<PropertyResult> run_verification(const Channel& w, const Dist& p_s,
                                             const VerifyOptions& opts,
                                             OmegaHook omega_hook, SlopeHook slope_hook) {
    if (!omega_hook)
        omega_hook = [](const Joint5& q, const Channel& ch, double a, double m, double l) {
            return omega_q(q, ch, a, m, l);
        };
    if (!slope_hook)
        slope_hook = [](const Joint5& q, const Channel& ch, double a, double m) {
            return omega_slope_at_zero(q, ch, a, m);
        };

    std::vector<PropertyResult> results;
    const int aux = exponent_aux_size(w);
    const Shape5 qshape(aux, aux, w.s_size, w.x_size, w.y_size);
    const std::vector<double> lambdas =
        opts.lambda_grid.empty() ? default_lambda_grid() : opts.lambda_grid;

    // Convexity of the log-moment in lambda: second differences >= -1e-9.
    {
        double worst = std::numeric_limits<double>::infinity();
        for (int c = 0; c < opts.seeded_cases; ++c) {
            const Joint5 q = random_supported_joint(qshape, w, mix_seed(opts.opt.seed, 101 + c));
            std::mt19937_64 gen(mix_seed(opts.opt.seed, 9000 + c));
            const double alpha = std::exp(std::log(0.1) + uniform01(gen) * std::log(20.0));
            const double mu = std::exp(std::log(0.1) + uniform01(gen) * std::log(20.0));
            std::vector<double> vals;
            for (double l : lambdas) vals.push_back(omega_hook(q, w, alpha, mu, l));
            for (std::size_t i = 0; i + 2 < vals.size(); ++i)
                worst = std::min(worst, vals[i] - 2.0 * vals[i + 1] + vals[i + 2]);
        }
        results.push_back(make("convexity_in_lambda", worst >= -1e-9, worst + 1e-9,
                               "min second difference " + format_sig(worst)));
    }

    // Slope identity at lambda -> 0+.
    {
        double worst = 0.0;
        for (int c = 0; c < opts.seeded_cases; ++c) {
            const Joint5 q = random_supported_joint(qshape, w, mix_seed(opts.opt.seed, 101 + c));
            std::mt19937_64 gen(mix_seed(opts.opt.seed, 9000 + c));
            const double alpha = std::exp(std::log(0.1) + uniform01(gen) * std::log(20.0));
            const double mu = std::exp(std::log(0.1) + uniform01(gen) * std::log(20.0));
            const double lim = omega_hook(q, w, alpha, mu, 1e-5) / 1e-5;
            const double slope = slope_hook(q, w, alpha, mu);
            worst = std::max(worst, std::abs(lim - slope));
        }
        results.push_back(make("slope_identity", worst <= 1e-4, 1e-4 - worst,
                               "max |numeric - analytic| " + format_sig(worst)));
    }

    // Nonnegativity of the maximized log-moment (the channel-consistent
    // independent joint is feasible and evaluates to 0).
    {
        double worst = std::numeric_limits<double>::infinity();
        ExponentSolver solver(w, opts.opt, opts.threads);
        for (double a : log_grid(0.25, 4.0, opts.tilt_grid))
            for (double m : log_grid(0.25, 4.0, opts.tilt_grid))
                for (double l : log_grid(0.05, 0.8, opts.tilt_grid))
                    worst = std::min(worst, solver.omega(TiltParams{a, m, l}));
        results.push_back(make("omega_w_nonnegative", worst >= -1e-9, worst + 1e-9,
                               "min omega_W " + format_sig(worst)));
    }

    // Separation: F = 0 well inside the region, F > 0 well outside. The
    // exponent's inner maximization leaves the state marginal free, so the
    // trace it separates against must do the same.
    {
        const SupportCurve curve = boundary(w, p_s, log_grid(1e-2, 1e2, opts.mu_points),
                                            opts.opt, /*pin_state=*/false, opts.threads);
        ExponentSolver solver(w, opts.opt, opts.threads);
        bool pass = true;
        double worst_out = std::numeric_limits<double>::infinity();
        double worst_in = 0.0;
        const double rd_hi = std::log(static_cast<double>(w.s_size)) + 0.25;
        for (int i = 0; i < opts.rate_points; ++i) {
            const double rd = rd_hi * (i + 0.5) / opts.rate_points;
            const double c = curve.value_at(rd);
            RatePoint outside{rd, c + opts.margin + 0.05};
            FSupResult fo = solver.f_sup(outside, opts.search);
            worst_out = std::min(worst_out, fo.f);
            if (fo.f <= 1e-4) pass = false;
            const double rin = c - opts.margin - 0.05;
            if (rin >= 0.0) {
                RatePoint inside{rd, rin};
                FSupResult fi = solver.f_sup(inside, opts.search);
                worst_in = std::max(worst_in, fi.f);
                if (fi.f > 1e-3) pass = false;
            }
        }
        results.push_back(make("separation", pass, std::min(worst_out - 1e-4, 1e-3 - worst_in),
                               "min outside F " + format_sig(worst_out) + ", max inside F " +
                                   format_sig(worst_in)));
    }

    // Main theorem against the exhaustive oracle, when enumerable.
    {
        const double count = code_count(w, opts.oracle_n, opts.oracle_k, opts.oracle_m);
        if (count > 1e9) {
            PropertyResult r;
            r.name = "main_theorem_oracle";
            r.status = PropertyResult::Status::skipped;
            r.detail = "instance has " + format_sig(count) + " codes, beyond the 1e9 guard";
            results.push_back(r);
        } else {
            TheoremReport rep = verify_main_theorem(w, p_s, opts.oracle_n, opts.oracle_k,
                                                    opts.oracle_m, opts.search, opts.opt);
            results.push_back(make("main_theorem_oracle", rep.pass, rep.slack,
                                   "G " + format_sig(rep.g_value) + ", F " +
                                       format_sig(rep.f_sup) + ", slack " +
                                       format_sig(rep.slack)));
        }
    }

    return results;
}

}  // namespace sdcexp
