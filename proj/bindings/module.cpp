#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sdcexp/channel_spec.hpp"
#include "sdcexp/exponent.hpp"
#include "sdcexp/oracle.hpp"
#include "sdcexp/region.hpp"
#include "sdcexp/util.hpp"
#include "sdcexp/verify.hpp"

namespace py = pybind11;
using namespace sdcexp;

namespace {

Channel channel_from_array(py::array_t<double, py::array::c_style | py::array::forcecast> w) {
    if (w.ndim() != 3) throw py::value_error("channel array must have shape (S, X, Y)");
    const int s = static_cast<int>(w.shape(0));
    const int x = static_cast<int>(w.shape(1));
    const int y = static_cast<int>(w.shape(2));
    std::vector<double> rows(w.data(), w.data() + w.size());
    return Channel(s, x, y, std::move(rows));
}

Joint5 joint_from_array(py::array_t<double, py::array::c_style | py::array::forcecast> m) {
    if (m.ndim() != 5) throw py::value_error("joint array must have shape (U, V, S, X, Y)");
    Shape5 sh(static_cast<int>(m.shape(0)), static_cast<int>(m.shape(1)),
              static_cast<int>(m.shape(2)), static_cast<int>(m.shape(3)),
              static_cast<int>(m.shape(4)));
    return Joint5(sh, std::vector<double>(m.data(), m.data() + m.size()));
}

py::array_t<double> joint_to_array(const Joint5& q) {
    const auto& d = q.shape.dim;
    py::array_t<double> out({d[0], d[1], d[2], d[3], d[4]});
    std::copy(q.mass.begin(), q.mass.end(), out.mutable_data());
    return out;
}

OptConfig config_from_kwargs(std::uint64_t seed, int starts, int max_iters) {
    OptConfig cfg;
    cfg.seed = seed;
    if (starts > 0) cfg.n_starts = starts;
    if (max_iters > 0) cfg.max_iters = max_iters;
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() =
        "Capacity regions, Gel'fand-Pinsker capacity and strong-converse exponents "
        "of state-dependent channels with rate-limited decoder side information";

    py::register_exception<GuardError>(m, "GuardError");
    py::register_exception<OptimizerError>(m, "OptimizerError");
    py::register_exception<SpecError>(m, "SpecError");

    py::class_<Channel>(m, "Channel")
        .def(py::init(&channel_from_array), py::arg("w"),
             "Build a channel from an (S, X, Y) stochastic array")
        .def_readonly("s_size", &Channel::s_size)
        .def_readonly("x_size", &Channel::x_size)
        .def_readonly("y_size", &Channel::y_size)
        .def("__call__", [](const Channel& w, int s, int x, int y) { return w(s, x, y); });

    py::class_<Joint5>(m, "Joint5")
        .def(py::init(&joint_from_array), py::arg("mass"))
        .def_property_readonly("mass", &joint_to_array)
        .def_property_readonly("shape", [](const Joint5& q) {
            const auto& d = q.shape.dim;
            return py::make_tuple(d[0], d[1], d[2], d[3], d[4]);
        });

    py::class_<TiltParams>(m, "TiltParams")
        .def(py::init<double, double, double>(), py::arg("alpha"), py::arg("mu"),
             py::arg("lambda_"))
        .def_readwrite("alpha", &TiltParams::alpha)
        .def_readwrite("mu", &TiltParams::mu)
        .def_readwrite("lambda_", &TiltParams::lambda);

    py::class_<ThetaParams>(m, "ThetaParams")
        .def(py::init<double, double, double>(), py::arg("alpha"), py::arg("mu"),
             py::arg("theta"))
        .def_readwrite("alpha", &ThetaParams::alpha)
        .def_readwrite("mu", &ThetaParams::mu)
        .def_readwrite("theta", &ThetaParams::theta);

    py::class_<RatePoint>(m, "RatePoint")
        .def(py::init<double, double>(), py::arg("r_d"), py::arg("r"))
        .def_readwrite("r_d", &RatePoint::r_d)
        .def_readwrite("r", &RatePoint::r);

    py::class_<SupportCurve>(m, "SupportCurve")
        .def_readonly("entries", &SupportCurve::entries)
        .def("value_at", &SupportCurve::value_at, py::arg("r_d"));

    py::class_<Code>(m, "Code")
        .def(py::init<>())
        .def_readwrite("n", &Code::n)
        .def_readwrite("k_size", &Code::k_size)
        .def_readwrite("m_size", &Code::m_size)
        .def_readwrite("state_enc", &Code::state_enc)
        .def_readwrite("chan_enc", &Code::chan_enc)
        .def_readwrite("decoder", &Code::decoder);

    py::enum_<Membership>(m, "Membership")
        .value("inside", Membership::inside)
        .value("outside", Membership::outside)
        .value("boundary", Membership::boundary);

    m.def(
        "load_channel",
        [](const std::string& path) {
            ChannelSpec spec = load_channel_spec(path);
            return py::make_tuple(spec.channel(), spec.state().p, spec.name);
        },
        py::arg("path"), "Load a JSON channel spec; returns (channel, state_dist, name)");

    m.def(
        "mutual_info",
        [](const Joint5& q, std::vector<int> a, std::vector<int> b, std::vector<int> c) {
            return mutual_info(q, a, b, c);
        },
        py::arg("joint"), py::arg("a"), py::arg("b"), py::arg("c") = std::vector<int>{});

    m.def(
        "marginal",
        [](const Joint5& q, std::vector<int> keep) {
            Marginal mg = marginal(q, keep);
            py::array_t<double> out(mg.dims);
            std::copy(mg.p.begin(), mg.p.end(), out.mutable_data());
            return out;
        },
        py::arg("joint"), py::arg("keep"));

    m.def("gp_tradeoff_objective", &gp_tradeoff_objective, py::arg("p"), py::arg("mu"));

    m.def(
        "c_mu",
        [](const Channel& w, std::vector<double> p_s, double mu, std::uint64_t seed, int starts,
           int max_iters, bool pin_state) {
            return c_mu(w, Dist(std::move(p_s)), mu, config_from_kwargs(seed, starts, max_iters),
                        pin_state);
        },
        py::arg("w"), py::arg("p_s"), py::arg("mu"), py::arg("seed") = 20250810,
        py::arg("starts") = 0, py::arg("max_iters") = 0, py::arg("pin_state") = true);

    m.def(
        "c_tilde",
        [](const Channel& w, double alpha, double mu, std::uint64_t seed, int starts,
           int max_iters) {
            return c_tilde(w, alpha, mu, config_from_kwargs(seed, starts, max_iters));
        },
        py::arg("w"), py::arg("alpha"), py::arg("mu"), py::arg("seed") = 20250810,
        py::arg("starts") = 0, py::arg("max_iters") = 0);

    m.def(
        "boundary",
        [](const Channel& w, std::vector<double> p_s, std::vector<double> mu_grid,
           std::uint64_t seed, int starts, bool pin_state, int threads) {
            return boundary(w, Dist(std::move(p_s)), mu_grid,
                            config_from_kwargs(seed, starts, 0), pin_state, threads);
        },
        py::arg("w"), py::arg("p_s"), py::arg("mu_grid"), py::arg("seed") = 20250810,
        py::arg("starts") = 0, py::arg("pin_state") = true, py::arg("threads") = 0);

    m.def("membership", &membership, py::arg("curve"), py::arg("pt"), py::arg("tol") = 1e-6);
    m.def("signed_slack", &signed_slack, py::arg("curve"), py::arg("pt"));

    m.def(
        "gp_capacity",
        [](const Channel& w, std::vector<double> p_s, std::uint64_t seed, int starts,
           int max_iters) {
            return gp_capacity(w, Dist(std::move(p_s)), config_from_kwargs(seed, starts, max_iters));
        },
        py::arg("w"), py::arg("p_s"), py::arg("seed") = 20250810, py::arg("starts") = 0,
        py::arg("max_iters") = 0);

    m.def("omega_q", &omega_q, py::arg("q"), py::arg("w"), py::arg("alpha"), py::arg("mu"),
          py::arg("lambda_"));
    m.def("omega_slope_at_zero", &omega_slope_at_zero, py::arg("q"), py::arg("w"),
          py::arg("alpha"), py::arg("mu"));
    m.def(
        "omega_W",
        [](const Channel& w, double alpha, double mu, double lambda, std::uint64_t seed,
           int starts, int max_iters) {
            return omega_W(w, alpha, mu, lambda, config_from_kwargs(seed, starts, max_iters));
        },
        py::arg("w"), py::arg("alpha"), py::arg("mu"), py::arg("lambda_"),
        py::arg("seed") = 20250810, py::arg("starts") = 0, py::arg("max_iters") = 0);

    m.def("f_of", &f_of, py::arg("rate"), py::arg("tp"), py::arg("omega_w_value"));
    m.def("theta_to_lambda", &theta_to_lambda, py::arg("tp"));
    m.def("lambda_to_theta", &lambda_to_theta, py::arg("tp"));

    m.def(
        "f_sup",
        [](const Channel& w, const RatePoint& rate, int grid_points, int refine_rounds,
           std::uint64_t seed, int starts, int max_iters, int threads) {
            SearchSpec search;
            if (grid_points > 0) search.grid_points = grid_points;
            if (refine_rounds >= 0) search.refine_rounds = refine_rounds;
            ExponentSolver solver(w, config_from_kwargs(seed, starts, max_iters), threads);
            FSupResult fs = solver.f_sup(rate, search);
            return py::make_tuple(fs.f, fs.argmax, fs.omega_at_argmax, fs.clamped);
        },
        py::arg("w"), py::arg("rate"), py::arg("grid_points") = 17,
        py::arg("refine_rounds") = 2, py::arg("seed") = 20250810, py::arg("starts") = 0,
        py::arg("max_iters") = 0, py::arg("threads") = 0,
        "Grid-search F(R_d,R|W); returns (f, argmax, omega_at_argmax, clamped)");

    m.def(
        "pc_exact",
        [](const Channel& w, std::vector<double> p_s, const Code& code) {
            return pc_exact(w, Dist(std::move(p_s)), code);
        },
        py::arg("w"), py::arg("p_s"), py::arg("code"));

    m.def(
        "g_n_exhaustive",
        [](const Channel& w, std::vector<double> p_s, int n, int k_size, int m_size) {
            GnResult res = g_n_exhaustive(w, Dist(std::move(p_s)), n, k_size, m_size);
            return py::make_tuple(res.g_value, res.best_code, res.pc_star);
        },
        py::arg("w"), py::arg("p_s"), py::arg("n"), py::arg("k_size"), py::arg("m_size"),
        "Exhaustive G^(n); returns (g_value, best_code, pc_star)");

    m.def(
        "mc_pc",
        [](const Channel& w, std::vector<double> p_s, const Code& code, std::int64_t trials,
           std::uint64_t seed) {
            McResult res = mc_pc(w, Dist(std::move(p_s)), code, trials, seed);
            return py::make_tuple(res.estimate, res.std_error);
        },
        py::arg("w"), py::arg("p_s"), py::arg("code"), py::arg("trials"), py::arg("seed"));

    m.def(
        "verify_main_theorem",
        [](const Channel& w, std::vector<double> p_s, int n, int k_size, int m_size,
           int grid_points, int refine_rounds, std::uint64_t seed, int starts) {
            SearchSpec search;
            if (grid_points > 0) search.grid_points = grid_points;
            if (refine_rounds >= 0) search.refine_rounds = refine_rounds;
            TheoremReport rep = verify_main_theorem(w, Dist(std::move(p_s)), n, k_size, m_size,
                                                    search, config_from_kwargs(seed, starts, 0));
            py::dict d;
            d["g_value"] = rep.g_value;
            d["pc_star"] = rep.pc_star;
            d["f_sup"] = rep.f_sup;
            d["slack"] = rep.slack;
            d["pc_bound"] = rep.pc_bound;
            d["pass"] = rep.pass;
            d["r_d"] = rep.rate.r_d;
            d["r"] = rep.rate.r;
            return d;
        },
        py::arg("w"), py::arg("p_s"), py::arg("n"), py::arg("k_size"), py::arg("m_size"),
        py::arg("grid_points") = 9, py::arg("refine_rounds") = 1, py::arg("seed") = 20250810,
        py::arg("starts") = 0);

#ifdef SDCEXP_VERSION
    m.attr("__version__") = SDCEXP_VERSION;
#else
    m.attr("__version__") = "dev";
#endif
}
