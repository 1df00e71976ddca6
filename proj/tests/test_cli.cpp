#include <doctest.h>

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ninc/cli.hpp"
#include "ninc/errors.hpp"

using ninc::cli::run;
using doctest::Approx;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result call(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> row;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) row.push_back(cell);
        if (!line.empty() && line.back() == ',') row.emplace_back();
        rows.push_back(row);
    }
    return rows;
}

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("ninc_cli_test_" + name);
}

int shell(const std::string& cmd) {
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("solve emits the root record") {
    const Result r = call({"solve", "--sigma1", "10", "--sigma2", "1", "--p", "2", "--e", "1",
                           "--theta1", "0.5", "--dim", "3"});
    REQUIRE(r.code == 0);
    CHECK(r.err.empty());
    const auto rows = csv(r.out);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == std::vector<std::string>{"x0", "sigma_star", "residual", "branch", "hs_value"});
    CHECK(std::stod(rows[1][0]) == Approx(-0.6));
    CHECK(std::stod(rows[1][1]) == Approx(2.8));
    CHECK(rows[1][3] == "LinearClosedForm");
    CHECK(std::stod(rows[1][4]) == Approx(2.8));
}

TEST_CASE("all-linear limit") {
    const Result r = call({"solve", "--theta1", "0", "--sigma2", "1.7", "--p", "3"});
    REQUIRE(r.code == 0);
    const auto rows = csv(r.out);
    CHECK(std::stod(rows[1][1]) == 1.7);
    CHECK(rows[1][3] == "AllLinear");
    CHECK(rows[1][4].empty());
}

TEST_CASE("domain errors exit 2 with one diagnostic line") {
    const Result r = call({"solve", "--p", "0.5"});
    CHECK(r.code == 2);
    CHECK(r.out.empty());
    CHECK(r.err.find("p must exceed 1") != std::string::npos);
    CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);

    CHECK(call({"solve", "--p", "abc"}).code == 2);
    CHECK(call({"solve", "--p", "2,5"}).code == 2);
    CHECK(call({"solve", "--bogus", "1"}).code == 2);
    CHECK(call({"frobnicate"}).code == 2);
    CHECK(call({}).code == 2);
    CHECK(call({"table", "--id", "9"}).code == 2);
    CHECK(call({"solve", "--format", "xml"}).code == 2);
    CHECK(call({"sens", "--theta1", "1"}).code == 2);
    CHECK(call({"field", "--re", "1", "--h", "0.4", "--theta1", "0.5"}).code == 2);
}

TEST_CASE("scientific notation is accepted") {
    const Result r = call({"solve", "--sigma1", "1e1", "--p", "2.0E0", "--e", "10e-1"});
    CHECK(r.code == 0);
    CHECK(std::stod(csv(r.out)[1][1]) == Approx(2.8));
}

TEST_CASE("solver failure exits 3") {
    const Result r = call({"solve", "--p", "1.3", "--max-iter", "1", "--abs-tol", "1e-300"});
    CHECK(r.code == 3);
    CHECK(r.err.find("did not converge") != std::string::npos);
}

TEST_CASE("help lists every flag") {
    const Result r = call({"--help"});
    CHECK(r.code == 0);
    for (const char* flag : {"--config", "--output", "--format", "--sigma1", "--sigma2", "--p", "--e",
                             "--theta1", "--dim", "--abs-tol", "--x-tol", "--max-iter", "--re",
                             "--points", "--h", "--quad-order", "--fd-step", "--id", "--axis",
                             "--from", "--to", "--n", "--quantities"})
        CHECK_MESSAGE(r.out.find(flag) != std::string::npos, flag);
    for (const char* cmd : {"solve", "field", "sens", "table", "verify", "sweep"})
        CHECK(r.out.find(cmd) != std::string::npos);
    CHECK(call({"sweep", "--help"}).code == 0);
}

TEST_CASE("field and sens records") {
    const Result f = call({"field", "--p", "3", "--theta1", "0.4", "--re", "2", "--points", "50"});
    REQUIRE(f.code == 0);
    const auto fr = csv(f.out);
    REQUIRE(fr.size() == 2);
    CHECK(fr[0].size() == 15);
    for (int k = 6; k <= 9; ++k) CHECK(std::stod(fr[1][k]) < 1e-10);
    CHECK(std::stod(fr[1][14]) < 1e-8);

    const Result s = call({"sens", "--p", "2.7", "--e", "2", "--theta1", "0.8"});
    REQUIRE(s.code == 0);
    const auto sr = csv(s.out);
    CHECK(sr[0][9] == "regime_threshold");
    CHECK(sr[1][9] == "Decreasing");
    CHECK(sr[1][11] == "true");
    CHECK(std::stod(sr[1][8]) < 1e-5);

    const Result lowe = call({"sens", "--e", "1"});
    CHECK(csv(lowe.out)[1].size() == 12);
    CHECK(csv(lowe.out)[1][9].empty());
}

TEST_CASE("table and verify") {
    const Result t = call({"table", "--id", "1"});
    REQUIRE(t.code == 0);
    const auto rows = csv(t.out);
    CHECK(rows.size() == 8);
    CHECK(rows[0][0] == "theta1");
    CHECK(std::stod(rows[4][4]) == Approx(-0.6));

    // The printed tables carry cells the exact solution does not reproduce.
    const Result v = call({"verify", "--id", "2"});
    CHECK(v.code == 1);
    const auto diff = csv(v.out);
    CHECK(diff[0] == std::vector<std::string>{"status", "theta1", "p", "computed", "rounded", "golden", "delta"});
    int mismatched = 0, guarded = 0;
    for (std::size_t i = 1; i < diff.size(); ++i) (diff[i][0] == "mismatch" ? mismatched : guarded)++;
    CHECK(mismatched == 4);
    CHECK(guarded == 6);
    CHECK(v.err.find("table 2: 4 mismatched, 6 guarded") != std::string::npos);
}

TEST_CASE("sweep output") {
    const Result r = call({"sweep", "--axis", "theta1", "--from", "0", "--to", "1", "--n", "11",
                           "--quantities", "root, sigma", "--p", "4"});
    REQUIRE(r.code == 0);
    const auto rows = csv(r.out);
    CHECK(rows.size() == 12);
    CHECK(rows[0] == std::vector<std::string>{"theta1", "root", "sigma", "hs"});
    CHECK(rows.back()[0] == "1");
    CHECK(call({"sweep", "--axis", "q"}).code == 2);
    CHECK(call({"sweep", "--quantities", "volts"}).code == 2);
}

TEST_CASE("identical argv gives identical bytes") {
    const std::vector<std::string> args = {"sweep", "--axis", "p", "--from", "1.1", "--to", "10",
                                           "--n", "30", "--quantities", "root,sigma,dx0_dp",
                                           "--e", "0.7", "--theta1", "0.6"};
    CHECK(call(args).out == call(args).out);
}

TEST_CASE("jsonl output round-trips") {
    const Result r = call({"solve", "--p", "2.7", "--e", "2", "--theta1", "0.3", "--dim", "2",
                           "--format", "jsonl"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    const double x0 = j.at("x0").get<double>();
    CHECK(j.at("sigma_star").get<double>() == Approx(1.0 / 2.0 * (2.0 - 2 * x0)).epsilon(1e-15));
    CHECK(j.at("branch") == "GeneralRoot");
    CHECK(j.at("hs_value").is_null());

    const Result csvr = call({"solve", "--p", "2.7", "--e", "2", "--theta1", "0.3", "--dim", "2"});
    CHECK(std::stod(csv(csvr.out)[1][0]) == x0);
}

TEST_CASE("config file, with flags taking precedence") {
    const auto path = temp_file("config.txt");
    {
        std::ofstream cfg(path);
        cfg << "# reference problem\n"
               "sigma1 = 10\n"
               "sigma2=1   # coating\n"
               "p = 4\n"
               "e = 2\n"
               "theta1 = 0.5\n"
               "max_iter = 300\n";
    }
    const Result a = call({"solve", "--config", path.string()});
    REQUIRE(a.code == 0);
    const Result b = call({"solve", "--config", path.string(), "--p", "2"});
    REQUIRE(b.code == 0);
    CHECK(csv(a.out)[1][3] == "GeneralRoot");
    CHECK(std::stod(csv(b.out)[1][1]) == Approx(2.8));

    {
        std::ofstream cfg(path);
        cfg << "colour = blue\n";
    }
    CHECK(call({"solve", "--config", path.string()}).code == 2);
    CHECK(call({"solve", "--config", (path.string() + ".missing")}).code == 2);
    std::filesystem::remove(path);

    const auto parsed = ninc::cli::parse_config_text("quad_order = 16\n\n  # c\nfd-step=1e-5");
    CHECK(parsed.at("quad-order") == "16");
    CHECK(parsed.at("fd-step") == "1e-5");
    CHECK_THROWS_AS(ninc::cli::parse_config_text("just words"), ninc::DomainError);
}

TEST_CASE("output file") {
    const auto path = temp_file("table.csv");
    const Result r = call({"table", "--id", "6", "--output", path.string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header.rfind("theta1,", 0) == 0);
    std::filesystem::remove(path);
}

TEST_CASE("worker count") {
    CHECK(ninc::cli::worker_count(nullptr) == 1);
    CHECK(ninc::cli::worker_count("") == 1);
    CHECK(ninc::cli::worker_count("4") == 4);
    CHECK_THROWS_AS(ninc::cli::worker_count("0"), ninc::DomainError);
    CHECK_THROWS_AS(ninc::cli::worker_count("two"), ninc::DomainError);
    CHECK_THROWS_AS(ninc::cli::worker_count("-3"), ninc::DomainError);
}

TEST_CASE("executable exit codes and thread cap") {
    const std::string exe = NINC_CLI_PATH;
    CHECK(shell(exe + " solve > /dev/null") == 0);
    CHECK(shell(exe + " solve --p 0.5 2> /dev/null") == 2);
    CHECK(shell(exe + " verify --id 1 > /dev/null 2>&1") == 1);
    CHECK(shell(exe + " --help > /dev/null") == 0);
    CHECK(shell("NIL_NUM_THREADS=zero " + exe + " table --id 1 > /dev/null 2>&1") == 2);
    const auto one = temp_file("t1.csv"), four = temp_file("t4.csv");
    CHECK(shell("NIL_NUM_THREADS=1 " + exe + " table --id 3 > " + one.string()) == 0);
    CHECK(shell("NIL_NUM_THREADS=4 " + exe + " table --id 3 > " + four.string()) == 0);
    std::ifstream a(one), b(four);
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    CHECK(sa.str() == sb.str());
    std::filesystem::remove(one);
    std::filesystem::remove(four);
}
