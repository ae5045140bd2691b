#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bandflow/commands.hpp"
#include "bandflow/text_io.hpp"
#include "cli.hpp"

using namespace bandflow;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "bandflow");
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string temp_file(const std::string& name, const std::string& content) {
    const auto path = std::filesystem::temp_directory_path() / ("bandflow_test_" + name);
    std::ofstream(path) << content;
    return path.string();
}

} // namespace

TEST_CASE("key=value arguments become long options") {
    const auto e = cli::expand_key_values({"prog", "spectrum", "model=lipkin", "two_j=3", "--xi0", "1", "branch=-"});
    CHECK(e[2] == "--model=lipkin");
    CHECK(e[3] == "--two-j=3");
    CHECK(e[4] == "--xi0");
    CHECK(e[6] == "--branch=-");
}

TEST_CASE("flow command on a 2x2 file") {
    const auto path = temp_file("swap.txt", "bandmat 2 1\n0 1 1\n");
    const Run r = run_cli({"flow", path});
    CHECK(r.code == kExitConverged);
    CHECK(r.err.find("diagonal: ") != std::string::npos);
    const CsvTable t = [&] {
        std::istringstream in(r.out);
        return read_csv(in);
    }();
    CHECK(t.header[0] == "ell");
    CHECK(parse_double(t.rows.back()[t.column("h0_0")]) == doctest::Approx(-1.0).epsilon(1e-10));
}

TEST_CASE("flow command exit statuses") {
    const auto diag = temp_file("diag.txt", "bandmat 3 0\n0 0 1\n1 1 2\n2 2 3\n");
    Run r = run_cli({"flow", diag});
    CHECK(r.code == kExitConverged);
    CHECK(r.err.find("ell_final: 0") != std::string::npos);

    const auto tri = temp_file("tri.txt", "bandmat 3 1\n0 0 1\n1 1 2\n2 2 3\n0 1 1\n1 2 1\n");
    r = run_cli({"flow", tri, "--ell-max", "0.01"});
    CHECK(r.code == kExitNotConverged);
    CHECK(!r.out.empty());

    const auto bad = temp_file("bad.txt", "bandmat 3 1\n0 0 x\n");
    r = run_cli({"flow", bad});
    CHECK(r.code == kExitInputError);
    CHECK(r.err.find("line 2") != std::string::npos);

    r = run_cli({"flow", "/nonexistent/file"});
    CHECK(r.code == kExitInputError);

    const auto trace_path = (std::filesystem::temp_directory_path() / "bandflow_test_trace.csv").string();
    r = run_cli({"flow", tri, "--trace", trace_path, "--trace-mode", "snapshots", "--snapshots", "0:1:5"});
    CHECK(r.code == kExitConverged);
    CHECK(r.out.find("converged: yes") != std::string::npos);
    std::ifstream in(trace_path);
    CHECK(read_csv(in).rows.size() == 5);
}

TEST_CASE("spectrum command with key=value parameters") {
    Run r = run_cli({"spectrum", "model=lipkin", "xi0=1", "v0=0.5", "two_j=2"});
    CHECK(r.code == kExitConverged);
    CHECK(r.out.find("sector,n,eps_flow") == 0);

    r = run_cli({"spectrum", "model=spinboson", "delta=0.4", "lambda=0", "omega=1", "branch=+", "levels=0,1,2,3"});
    CHECK(r.code == kExitConverged);
    std::istringstream in(r.out);
    const CsvTable t = read_csv(in);
    CHECK(parse_double(t.rows[2][t.column("eps_oracle")]) == doctest::Approx(2.2));

    r = run_cli({"spectrum", "model=spinboson", "lambda=1000", "levels=0"});
    CHECK(r.code == kExitTruncationError);
    CHECK(r.err.find("n-trunc") != std::string::npos);

    r = run_cli({"spectrum", "model=nope"});
    CHECK(r.code == kExitInputError);
    r = run_cli({"spectrum", "--omega", "-1"});
    CHECK(r.code == kExitInputError);
    r = run_cli({"spectrum", "--branch=x"});
    CHECK(r.code == kExitInputError);
    r = run_cli({"spectrum", "--no-such-flag"});
    CHECK(r.code == kExitInputError);
}

TEST_CASE("help exits cleanly") {
    const Run r = run_cli({"--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("compare-generators") != std::string::npos);
    const Run sub = run_cli({"fig1", "--help"});
    CHECK(sub.code == 0);
    CHECK(sub.out.find("0:5:26") != std::string::npos);
}

TEST_CASE("compare-generators command") {
    const Run r = run_cli({"compare-generators", "--scaled-ells", "0,0.1"});
    CHECK(r.code == kExitConverged);
    CHECK(r.out.find("generator,ell,ell_scaled,offset,max_abs") == 0);
    CHECK(r.err.find("oracle:") != std::string::npos);
}
