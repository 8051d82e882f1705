#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fairpol/cli.hpp"
#include "fairpol/dataset.hpp"
#include "fairpol/sim.hpp"

using namespace fairpol;

namespace {

struct CliRun {
    int code = 0;
    std::string out;
    std::string err;
};

CliRun run(const std::vector<std::string>& args) {
    CliRun r;
    r.code = run_cli(args, r.out, r.err);
    return r;
}

std::filesystem::path fresh_dir(const char* name) {
    const std::filesystem::path dir = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

/// A small but well-populated synthetic sample on disk.
std::string sample_csv(const std::filesystem::path& dir) {
    DgpSpec spec;
    spec.support_per_group = 6;
    spec.covariate_dim = 2;
    Dgp dgp = make_calibrated_dgp(spec, 41u);
    Dataset ds = draw_sample(dgp, 60, 11u);
    const std::filesystem::path path = dir / "sample.csv";
    write_csv(ds, path.string());
    return path.string();
}

}  // namespace

TEST_CASE("usage is printed without arguments or on help") {
    CliRun empty = run({});
    CHECK(empty.code == 2);
    CHECK(contains(empty.out, "usage:"));

    CliRun help = run({"--help"});
    CHECK(help.code == 0);
    CHECK(contains(help.out, "usage:"));
    CHECK(run({"help"}).code == 0);
    CHECK(run({"-h"}).code == 0);
}

TEST_CASE("configuration mistakes exit with code 2 and a named complaint") {
    const std::filesystem::path dir = fresh_dir("fairpol_cli_badcfg");

    CliRun unknown_cmd = run({"tabulate", "--output_dir", dir.string()});
    CHECK(unknown_cmd.code == 2);
    CHECK(contains(unknown_cmd.err, "configuration error"));

    CliRun unknown_key = run({"estimate", "--bogus.key", "1"});
    CHECK(unknown_key.code == 2);
    CHECK(contains(unknown_key.err, "bogus.key"));

    CliRun dangling = run({"estimate", "--data"});
    CHECK(dangling.code == 2);
    CHECK(contains(dangling.err, "missing its value"));

    CliRun no_data = run({"estimate", "--output_dir", dir.string()});
    CHECK(no_data.code == 2);
    CHECK(contains(no_data.err, "'data' is required"));
}

TEST_CASE("broken data files exit with code 3") {
    const std::filesystem::path dir = fresh_dir("fairpol_cli_baddata");
    const std::filesystem::path bad = dir / "bad.csv";
    {
        std::ofstream out(bad);
        out << "y,d,s,x1\n1.0,zero,0,0.5\n0.5,1,1,0.25\n";
    }
    CliRun broken = run({"estimate", "--data", bad.string(), "--output_dir", dir.string()});
    CHECK(broken.code == 3);
    CHECK(contains(broken.err, "data error"));

    CliRun missing = run({"estimate", "--data", (dir / "absent.csv").string(),
                          "--output_dir", dir.string()});
    CHECK(missing.code == 3);
}

TEST_CASE("estimate writes its artifacts deterministically and the echo reloads") {
    const std::filesystem::path root = fresh_dir("fairpol_cli_estimate");
    const std::string csv = sample_csv(root);
    const std::filesystem::path dir1 = root / "run1";
    const std::filesystem::path dir2 = root / "run2";
    const std::filesystem::path dir3 = root / "echoed";

    const std::vector<std::string> base{
        "estimate",          "--data",           csv,
        "--output_dir",      dir1.string(),      "--policy.kind",
        "linear_probability", "--estimation.folds", "2",
        "--frontier.grid_n", "3",                "--measure.kind",
        "welfare_disparity", "--measure.absolute", "true",
        "--seed",            "5"};
    CliRun first = run(base);
    CHECK(first.err.empty());
    REQUIRE(first.code == 0);
    CHECK(contains(first.out, "chosen_alpha"));

    const std::string result1 = read_file(dir1 / "result.txt");
    CHECK(contains(result1, "[selection]"));
    CHECK(contains(result1, "chosen_alpha = "));
    CHECK(contains(result1, "[unfairness]"));
    const std::string frontier1 = read_file(dir1 / "frontier.csv");
    CHECK(frontier1.rfind("alpha,w_bar,w0,w1,status,gap\n", 0) == 0);
    const std::string echo1 = read_file(dir1 / "config_echo.cfg");
    CHECK(contains(echo1, "command = estimate"));
    CHECK(contains(echo1, "measure.kind = welfare_disparity"));
    CHECK(contains(echo1, "measure.absolute = true"));

    // Same configuration, fresh directory: byte-identical analysis artifacts.
    std::vector<std::string> again = base;
    again[4] = dir2.string();
    REQUIRE(run(again).code == 0);
    CHECK(read_file(dir2 / "result.txt") == result1);
    CHECK(read_file(dir2 / "frontier.csv") == frontier1);

    // Rerunning from the echoed configuration reproduces the run too.
    CliRun echoed = run({"estimate", "--config", (dir1 / "config_echo.cfg").string(),
                         "--output_dir", dir3.string()});
    REQUIRE(echoed.code == 0);
    CHECK(read_file(dir3 / "result.txt") == result1);
}

TEST_CASE("frontier traces gridpoints without estimating a policy") {
    const std::filesystem::path root = fresh_dir("fairpol_cli_frontier");
    const std::string csv = sample_csv(root);
    CliRun r = run({"frontier", "--data", csv, "--output_dir", root.string(),
                    "--policy.kind", "linear_probability", "--estimation.folds", "2",
                    "--frontier.grid_n", "2", "--seed", "5"});
    CHECK(r.err.empty());
    REQUIRE(r.code == 0);
    CHECK(contains(r.out, "2 gridpoints"));
    const std::string text = read_file(root / "frontier.csv");
    CHECK(text.rfind("alpha,w_bar,w0,w1,status,gap\n", 0) == 0);
    std::size_t lines = 0;
    for (char c : text) {
        if (c == '\n') ++lines;
    }
    CHECK(lines == 3);  // header + one row per gridpoint
}

TEST_CASE("evaluate reports a supplied rule and requires its coefficients") {
    const std::filesystem::path root = fresh_dir("fairpol_cli_evaluate");
    const std::string csv = sample_csv(root);

    CliRun bare = run({"evaluate", "--data", csv, "--output_dir", root.string()});
    CHECK(bare.code == 2);
    CHECK(contains(bare.err, "evaluate"));

    CliRun r = run({"evaluate", "--data", csv, "--output_dir", root.string(),
                    "--policy.kind", "linear_probability", "--estimation.folds", "2",
                    "--evaluate.beta0", "0.3", "--evaluate.phi", "0.05,-0.02",
                    "--seed", "5"});
    CHECK(r.err.empty());
    REQUIRE(r.code == 0);
    const std::string text = read_file(root / "evaluation.txt");
    CHECK(contains(text, "[welfare]"));
    CHECK(contains(text, "w0 = "));
    CHECK(contains(text, "envy = "));
    // Fractional rules cannot be scored for predictive parity.
    CHECK(contains(text, "predictive_parity = skipped ("));
}

TEST_CASE("simulate runs a small replication study end to end") {
    const std::filesystem::path root = fresh_dir("fairpol_cli_simulate");
    CliRun r = run({"simulate", "--output_dir", root.string(), "--sim.n", "60",
                    "--sim.replications", "2", "--sim.support", "5", "--sim.methods",
                    "ewm", "--policy.kind", "linear_probability", "--estimation.folds",
                    "2", "--seed", "13"});
    CHECK(r.err.empty());
    REQUIRE(r.code == 0);
    CHECK(contains(r.out, "2/2 replications completed"));

    const std::string text = read_file(root / "summary.csv");
    CHECK(text.rfind("method,metric,mean,se,R,n\n", 0) == 0);
    std::size_t lines = 0;
    for (char c : text) {
        if (c == '\n') ++lines;
    }
    CHECK(lines == 8);  // header + 7 metrics for the single method

    // The workflow defaults in a treated-mass cap; the echo records it.
    const std::string echo = read_file(root / "config_echo.cfg");
    CHECK(contains(echo, "policy.capacity = 0.375"));
    CHECK(contains(echo, "command = simulate"));
}
