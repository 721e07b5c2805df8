#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "helpers.hpp"

#ifndef SDCEXP_CLI_PATH
#define SDCEXP_CLI_PATH "sdcexp"
#endif

namespace {

struct RunResult {
    int exit_code;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunResult run_cli(const std::string& args, const std::string& tag) {
    const std::string out_path = "/tmp/sdcexp_test_" + tag + ".out";
    const std::string err_path = "/tmp/sdcexp_test_" + tag + ".err";
    const std::string cmd =
        std::string(SDCEXP_CLI_PATH) + " " + args + " >" + out_path + " 2>" + err_path;
    const int status = std::system(cmd.c_str());
    RunResult res;
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    res.out = slurp(out_path);
    res.err = slurp(err_path);
    return res;
}

std::string write_temp_spec(const std::string& name, const std::string& body) {
    const std::string path = "/tmp/sdcexp_spec_" + name + ".json";
    std::ofstream out(path);
    out << body;
    return path;
}

}  // namespace

TEST_CASE("region subcommand emits the support curve and boundary trace") {
    const std::string spec = testutil::channel_path("useless_binary");
    RunResult res = run_cli("region " + spec + " --out /tmp/sdcexp_region.csv", "region");
    CHECK(res.exit_code == 0);

    std::string csv = slurp("/tmp/sdcexp_region.csv");
    REQUIRE(csv.rfind("mu,c_mu\n", 0) == 0);
    // every support value of the useless channel is ~0
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    int rows = 0;
    while (std::getline(lines, line)) {
        const auto comma = line.find(',');
        REQUIRE(comma != std::string::npos);
        CHECK(std::abs(std::stod(line.substr(comma + 1))) < 1e-3);
        ++rows;
    }
    CHECK(rows == 41);

    std::string rd_csv = slurp("/tmp/sdcexp_region_rd.csv");
    CHECK(rd_csv.rfind("r_d,c_of_r_d\n", 0) == 0);
}

TEST_CASE("region with a single mu produces one data row") {
    const std::string spec = testutil::channel_path("useless_binary");
    RunResult res =
        run_cli("region " + spec + " --mu-grid 1 --out /tmp/sdcexp_region1.csv", "region1");
    CHECK(res.exit_code == 0);
    std::string csv = slurp("/tmp/sdcexp_region1.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);  // header + one row
}

TEST_CASE("malformed specs are rejected with exit code 2 and the offending row") {
    const std::string path = write_temp_spec("badrow", R"({
      "s_size": 2, "x_size": 2, "y_size": 2,
      "state_dist": [0.5, 0.5],
      "w": [[[0.5,0.5],[0.5,0.5]],[[0.5,0.4],[0.5,0.5]]]
    })");
    RunResult res = run_cli("region " + path + " --out /tmp/sdcexp_bad.csv", "badrow");
    CHECK(res.exit_code == 2);
    CHECK(res.err.find("w[1][0]") != std::string::npos);
}

TEST_CASE("exponent runs are byte-identical for a fixed seed") {
    const std::string spec = testutil::channel_path("useless_binary");
    const std::string flags =
        " --rd 0.1 --r 0.5 --seed 99 --grid-points 5 --grid-refine 1 --threads 2";
    RunResult a =
        run_cli("exponent " + spec + flags + " --out /tmp/sdcexp_exp_a.csv", "exp_a");
    RunResult b =
        run_cli("exponent " + spec + flags + " --out /tmp/sdcexp_exp_b.csv", "exp_b");
    CHECK(a.exit_code == 0);
    CHECK(b.exit_code == 0);
    CHECK(slurp("/tmp/sdcexp_exp_a.csv") == slurp("/tmp/sdcexp_exp_b.csv"));
    CHECK(a.out == b.out);
    CHECK(a.out.find("F=") != std::string::npos);
}

TEST_CASE("oracle subcommand reports the exhaustive exponent") {
    const std::string useless = testutil::channel_path("useless_binary");
    RunResult res = run_cli("oracle " + useless +
                                " --n 1 --k 2 --m 1 --grid-points 5 --grid-refine 1",
                            "oracle_useless");
    CHECK(res.exit_code == 0);
    CHECK(res.out.find("G=0.693147") != std::string::npos);
    CHECK(res.out.find("PASS") != std::string::npos);

    const std::string noiseless = testutil::channel_path("noiseless_binary");
    RunResult res2 = run_cli("oracle " + noiseless +
                                 " --n 1 --k 2 --m 1 --grid-points 5 --grid-refine 1",
                             "oracle_noiseless");
    CHECK(res2.exit_code == 0);
    CHECK(res2.out.find("G=0 ") != std::string::npos);
}

TEST_CASE("oracle guard produces exit code 3 with the computed count") {
    const std::string spec = testutil::channel_path("bsc01_stateless");
    RunResult res = run_cli("oracle " + spec + " --n 2 --k 4 --m 2", "oracle_guard");
    CHECK(res.exit_code == 3);
    CHECK(res.err.find("1e9") != std::string::npos);
}

TEST_CASE("verify passes on a bundled binary channel") {
    const std::string spec = testutil::channel_path("noiseless_binary");
    RunResult res = run_cli("verify " + spec +
                                " --cases 5 --grid-points 5 --grid-refine 1 --mu-points 7 "
                                "--rate-points 1 --starts 6 --threads 2",
                            "verify_ok");
    CHECK(res.exit_code == 0);
    CHECK(res.out.find("FAIL") == std::string::npos);
    CHECK(res.out.find("PASS convexity_in_lambda") != std::string::npos);
    CHECK(res.out.find("PASS separation") != std::string::npos);
}

TEST_CASE("verify skips an infeasible oracle instance but runs the rest") {
    // six-symbol uniform channel: far beyond the enumeration guard at n=3
    std::ostringstream spec;
    spec.precision(17);
    spec << R"({"s_size": 6, "x_size": 6, "y_size": 6, "state_dist": )";
    spec << "[" << (1.0 / 6) << "," << (1.0 / 6) << "," << (1.0 / 6) << "," << (1.0 / 6) << ","
         << (1.0 / 6) << "," << (1.0 / 6) << "], \"w\": [";
    for (int s = 0; s < 6; ++s) {
        spec << (s ? "," : "") << "[";
        for (int x = 0; x < 6; ++x) {
            spec << (x ? "," : "") << "[";
            for (int y = 0; y < 6; ++y) spec << (y ? "," : "") << (1.0 / 6);
            spec << "]";
        }
        spec << "]";
    }
    spec << "]}";
    const std::string path = write_temp_spec("six", spec.str());
    RunResult res = run_cli("verify " + path +
                                " --n 3 --k 6 --m 6 --cases 2 --grid-points 2 --grid-refine 0 "
                                "--mu-points 3 --rate-points 1 --starts 2 --threads 2",
                            "verify_skip");
    CHECK(res.out.find("SKIPPED main_theorem_oracle") != std::string::npos);
    CHECK(res.out.find("PASS convexity_in_lambda") != std::string::npos);
    CHECK(res.exit_code == 0);
}
