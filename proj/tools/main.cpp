#include <cmath>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sdcexp/channel_spec.hpp"
#include "sdcexp/exponent.hpp"
#include "sdcexp/oracle.hpp"
#include "sdcexp/region.hpp"
#include "sdcexp/util.hpp"
#include "sdcexp/verify.hpp"

namespace {

using namespace sdcexp;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitGuard = 3;
constexpr int kExitOptimizer = 4;

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SpecError("cannot open output file: " + path);
    out << text;
}

std::string rd_companion_path(const std::string& out) {
    const auto dot = out.find_last_of('.');
    if (dot == std::string::npos || out.find('/', dot) != std::string::npos)
        return out + "_rd";
    return out.substr(0, dot) + "_rd" + out.substr(dot);
}

int cmd_region(const std::string& spec_path, std::vector<double> mu_grid,
               const std::string& out, std::uint64_t seed, int starts, bool free_state,
               int threads) {
    ChannelSpec spec = load_channel_spec(spec_path);
    Channel w = spec.channel();
    Dist p_s = spec.state();
    if (mu_grid.empty()) mu_grid = log_grid(1e-2, 1e2, 41);

    OptConfig cfg;
    cfg.seed = seed;
    if (starts > 0) cfg.n_starts = starts;

    SupportCurve curve = boundary(w, p_s, mu_grid, cfg, !free_state, threads);

    std::string csv = "mu,c_mu\n";
    for (const auto& [mu, c] : curve.entries)
        csv += format_sig(mu) + "," + format_sig(c) + "\n";
    write_file(out, csv);

    const double rd_max = std::log(std::max(w.s_size, 2));
    std::string csv_rd = "r_d,c_of_r_d\n";
    for (int i = 0; i < 41; ++i) {
        const double rd = rd_max * i / 40.0;
        csv_rd += format_sig(rd) + "," + format_sig(curve.value_at(rd)) + "\n";
    }
    const std::string rd_path = rd_companion_path(out);
    write_file(rd_path, csv_rd);

    std::cout << "region: " << curve.entries.size() << " support entries -> " << out
              << ", boundary trace -> " << rd_path << "\n";
    std::cout << "C(0) = " << format_sig(curve.value_at(0.0)) << ", C(" << format_sig(rd_max)
              << ") = " << format_sig(curve.value_at(rd_max)) << "\n";
    return kExitOk;
}

int cmd_exponent(const std::string& spec_path, double rd, double r, const std::string& out,
                 std::uint64_t seed, int starts, int grid_points, int grid_refine,
                 int threads) {
    ChannelSpec spec = load_channel_spec(spec_path);
    Channel w = spec.channel();

    OptConfig cfg;
    cfg.seed = seed;
    if (starts > 0) cfg.n_starts = starts;
    SearchSpec search;
    if (grid_points > 0) search.grid_points = grid_points;
    if (grid_refine >= 0) search.refine_rounds = grid_refine;

    ExponentSolver solver(w, cfg, threads);
    FSupResult fs = solver.f_sup(RatePoint{rd, r}, search);

    std::string csv = "alpha,mu,lambda,omega_w,f\n";
    for (const auto& e : fs.evaluated)
        csv += format_sig(e.tp.alpha) + "," + format_sig(e.tp.mu) + "," +
               format_sig(e.tp.lambda) + "," + format_sig(e.omega_w) + "," +
               format_sig(e.f_value) + "\n";
    if (!out.empty()) write_file(out, csv);

    if (fs.clamped)
        std::cout << "note: grid maximum " << format_sig(fs.f_unclamped)
                  << " < 0; F clamped at 0 (lambda -> 0 edge)\n";
    std::cout << "F=" << format_sig(fs.f) << " at alpha=" << format_sig(fs.argmax.alpha)
              << " mu=" << format_sig(fs.argmax.mu)
              << " lambda=" << format_sig(fs.argmax.lambda) << "\n";
    return kExitOk;
}

int cmd_verify(const std::string& spec_path, std::uint64_t seed, int starts, int cases,
               int grid_points, int grid_refine, int mu_points, int rate_points, int n,
               int k, int m, int threads) {
    ChannelSpec spec = load_channel_spec(spec_path);
    Channel w = spec.channel();
    Dist p_s = spec.state();

    VerifyOptions opts;
    opts.opt.seed = seed;
    if (starts > 0) opts.opt.n_starts = starts;
    if (cases > 0) opts.seeded_cases = cases;
    if (grid_points > 0) opts.search.grid_points = grid_points;
    if (grid_refine >= 0) opts.search.refine_rounds = grid_refine;
    if (mu_points > 0) opts.mu_points = mu_points;
    if (rate_points > 0) opts.rate_points = rate_points;
    opts.oracle_n = n;
    opts.oracle_k = k;
    opts.oracle_m = m;
    opts.threads = threads;

    const auto results = run_verification(w, p_s, opts);
    bool all_pass = true;
    for (const auto& r : results) {
        const char* status = r.status == PropertyResult::Status::pass      ? "PASS"
                             : r.status == PropertyResult::Status::skipped ? "SKIPPED"
                                                                           : "FAIL";
        std::cout << status << " " << r.name << " slack=" << format_sig(r.slack) << " ("
                  << r.detail << ")\n";
        if (r.status == PropertyResult::Status::fail) all_pass = false;
    }
    return all_pass ? kExitOk : 1;
}

int cmd_oracle(const std::string& spec_path, int n, int k, int m, std::uint64_t seed,
               int starts, int grid_points, int grid_refine) {
    ChannelSpec spec = load_channel_spec(spec_path);
    Channel w = spec.channel();
    Dist p_s = spec.state();

    const double count = code_count(w, n, k, m);
    std::cout << "instance: n=" << n << " k=" << k << " m=" << m << ", " << format_sig(count)
              << " deterministic codes\n";

    OptConfig cfg;
    cfg.seed = seed;
    if (starts > 0) cfg.n_starts = starts;
    SearchSpec search;
    if (grid_points > 0) search.grid_points = grid_points;
    if (grid_refine >= 0) search.refine_rounds = grid_refine;

    TheoremReport rep = verify_main_theorem(w, p_s, n, k, m, search, cfg);
    std::cout << "G=" << format_sig(rep.g_value) << " (best P_c=" << format_sig(rep.pc_star)
              << ")\n";
    std::cout << "rate point: r_d=" << format_sig(rep.rate.r_d)
              << " r=" << format_sig(rep.rate.r) << "\n";
    std::cout << "F=" << format_sig(rep.f_sup) << " at alpha=" << format_sig(rep.f_argmax.alpha)
              << " mu=" << format_sig(rep.f_argmax.mu)
              << " lambda=" << format_sig(rep.f_argmax.lambda) << "\n";
    std::cout << "slack G - (F - ln5/n) = " << format_sig(rep.slack)
              << (rep.slack >= -1e-9 ? " (PASS)" : " (FAIL)") << "\n";
    std::cout << "P_c* <= min(1, 5 e^{-nF}) : " << format_sig(rep.pc_star)
              << " <= " << format_sig(rep.pc_bound) << "\n";

    GnResult gn = g_n_exhaustive(w, p_s, n, k, m);
    auto print_table = [](const char* name, const std::vector<int>& t) {
        std::cout << name << ":";
        for (int v : t) std::cout << " " << v;
        std::cout << "\n";
    };
    print_table("best state_enc", gn.best_code.state_enc);
    print_table("best chan_enc", gn.best_code.chan_enc);
    print_table("best decoder", gn.best_code.decoder);
    return rep.pass ? kExitOk : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Capacity regions and strong-converse exponents of state-dependent channels "
        "with rate-limited decoder side information"};
    app.require_subcommand(1);

    std::string spec_path, out_path;
    std::vector<double> mu_grid;
    double rd = 0.0, r = 0.0;
    std::uint64_t seed = 20250810;
    int starts = 0, grid_points = 0, grid_refine = -1, threads = 0;
    int cases = 0, mu_points = 0, rate_points = 0;
    int n = 1, k = 2, m = 2;
    bool free_state = false;

    auto* region = app.add_subcommand(
        "region",
        "Trace C^(mu) and the boundary C(R_d); writes CSV columns mu,c_mu and a\n"
        "companion *_rd file with columns r_d,c_of_r_d");
    region->add_option("spec", spec_path, "channel spec file (JSON)")->required();
    region->add_option("--mu-grid", mu_grid, "explicit mu values (default: 41-point log grid)")
        ->delimiter(',');
    region->add_option("--out", out_path, "output CSV path")->required();
    region->add_option("--seed", seed, "optimizer seed");
    region->add_option("--starts", starts, "multi-start count");
    region->add_option("--threads", threads, "worker threads (0 = auto)");
    region->add_flag("--free-state", free_state,
                     "leave the S-marginal free instead of pinning it to the state source");

    auto* exponent = app.add_subcommand(
        "exponent",
        "Evaluate F(R_d,R|W) by grid search; writes CSV columns\n"
        "alpha,mu,lambda,omega_w,f and prints the achieving triple");
    exponent->add_option("spec", spec_path, "channel spec file (JSON)")->required();
    exponent->add_option("--rd", rd, "decoder state-information rate (nats)")->required();
    exponent->add_option("--r", r, "message rate (nats)")->required();
    exponent->add_option("--out", out_path, "output CSV path");
    exponent->add_option("--seed", seed, "optimizer seed");
    exponent->add_option("--starts", starts, "multi-start count");
    exponent->add_option("--grid-points", grid_points, "base grid points per axis");
    exponent->add_option("--grid-refine", grid_refine, "refinement rounds");
    exponent->add_option("--threads", threads, "worker threads (0 = auto)");

    auto* verify = app.add_subcommand("verify", "Run the property verification suite");
    verify->add_option("spec", spec_path, "channel spec file (JSON)")->required();
    verify->add_option("--seed", seed, "optimizer seed");
    verify->add_option("--starts", starts, "multi-start count");
    verify->add_option("--cases", cases, "seeded cases for convexity/slope checks");
    verify->add_option("--grid-points", grid_points, "exponent search grid points");
    verify->add_option("--grid-refine", grid_refine, "exponent refinement rounds");
    verify->add_option("--mu-points", mu_points, "boundary trace points");
    verify->add_option("--rate-points", rate_points, "separation points per side");
    verify->add_option("--n", n, "oracle blocklength");
    verify->add_option("--k", k, "oracle message count");
    verify->add_option("--m", m, "oracle state-code count");
    verify->add_option("--threads", threads, "worker threads (0 = auto)");

    auto* oracle = app.add_subcommand("oracle", "Exhaustive small-blocklength code search");
    oracle->add_option("spec", spec_path, "channel spec file (JSON)")->required();
    oracle->add_option("--n", n, "blocklength")->required();
    oracle->add_option("--k", k, "message count |K|")->required();
    oracle->add_option("--m", m, "state-code count |M|")->required();
    oracle->add_option("--seed", seed, "optimizer seed");
    oracle->add_option("--starts", starts, "multi-start count");
    oracle->add_option("--grid-points", grid_points, "exponent search grid points");
    oracle->add_option("--grid-refine", grid_refine, "exponent refinement rounds");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitValidation;
    }

    try {
        if (region->parsed())
            return cmd_region(spec_path, mu_grid, out_path, seed, starts, free_state, threads);
        if (exponent->parsed())
            return cmd_exponent(spec_path, rd, r, out_path, seed, starts, grid_points,
                                grid_refine, threads);
        if (verify->parsed())
            return cmd_verify(spec_path, seed, starts, cases, grid_points, grid_refine,
                              mu_points, rate_points, n, k, m, threads);
        if (oracle->parsed())
            return cmd_oracle(spec_path, n, k, m, seed, starts, grid_points, grid_refine);
    } catch (const SpecError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const GuardError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitGuard;
    } catch (const OptimizerError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitOptimizer;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitValidation;
}
