#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct RunResult {
    int exit_code;
    std::string out;
};

RunResult run(const std::string& args) {
    const std::string out_file = "cli_test_out.txt";
    const std::string cmd = std::string(LPK_CLI_PATH) + " " + args + " > " + out_file + " 2>&1";
    const int raw = std::system(cmd.c_str());
    std::ifstream in(out_file);
    std::stringstream ss;
    ss << in.rdbuf();
    return {WEXITSTATUS(raw), ss.str()};
}

} // namespace

TEST_CASE("usage errors exit with code 2") {
    CHECK(run("").exit_code == 2);
    CHECK(run("price").exit_code == 2);                    // missing required flags
    CHECK(run("price --t 1 --strike 1 --bogus").exit_code == 2);
    CHECK(run("frobnicate").exit_code == 2);
    CHECK(run("law gk --model gbm").exit_code == 2);       // missing --strike
    CHECK(run("law zz --model gbm --strike 1").exit_code == 2);
    CHECK(run("verify no_such_check --paths 10").exit_code == 2);
    CHECK(run("embed --measure /no/such/file").exit_code == 2);
}

TEST_CASE("price prints the quote and the cross-check line") {
    const auto res = run("price --t 1 --strike 1");
    CHECK(res.exit_code == 0);
    CHECK(res.out.find("call 0.382925") != std::string::npos);
    CHECK(res.out.find("alt-BS agreement:") != std::string::npos);

    const auto intrinsic = run("price --t 0 --strike 0.7");
    CHECK(intrinsic.exit_code == 0);
    CHECK(intrinsic.out.find("call 0.300000") != std::string::npos);
}

TEST_CASE("law table: first row carries the atom") {
    const auto res = run("law gk --model gbm --strike 2 --grid 0:10:5 --csv");
    CHECK(res.exit_code == 0);
    CHECK(res.out.rfind("t,atom,density,cdf", 0) == 0);
    CHECK(res.out.find("\n0,0.5,0,0.5") != std::string::npos);
}

TEST_CASE("verify runs one check and respects exit codes") {
    const auto res = run("verify max_martingale --paths 8000 --dt 0.005 --horizon 2 --json");
    CHECK(res.exit_code == 0);
    CHECK(res.out.find("\"name\": \"max_martingale\"") != std::string::npos);
    CHECK(res.out.find("\"wall_time_s\": null") != std::string::npos);
}

TEST_CASE("verify output is byte-identical for identical invocations") {
    const std::string args = "verify doob_maximal --paths 400 --dt 0.02 --horizon 4 --json";
    const auto a = run(args);
    const auto b = run(args);
    CHECK(a.exit_code == b.exit_code);
    CHECK(a.out == b.out);
    CHECK_FALSE(a.out.empty());
}

TEST_CASE("embed reads the documented text format") {
    {
        std::ofstream f("cli_test_measure.txt");
        f.precision(17);
        f << "atom -1 " << 2.0 / 3.0 << "\natom 2 " << 1.0 / 3.0 << "\n";
    }
    const auto res = run("embed --measure cli_test_measure.txt --paths 2000 --dt 0.005 --horizon 16");
    CHECK(res.exit_code == 0);
    CHECK(res.out.find("mean of stopped values:") != std::string::npos);
    CHECK(res.out.find("atom") != std::string::npos);
}
