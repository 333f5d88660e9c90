#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run(const std::string& args, const std::string& env = "") {
    std::string cmd = env + " " + NARROWBAND_CLI_PATH + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult res;
    char buf[512];
    while (fgets(buf, sizeof(buf), pipe)) res.output += buf;
    int status = pclose(pipe);
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

fs::path scratch_dir() {
    fs::path dir = fs::temp_directory_path() / ("nbcli_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream os(p);
    os << text;
}

std::string read_file(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

const char* kSweepConfig = R"({
  "builder": "line",
  "lambda": 1.0,
  "regime": "line",
  "triple": ["2", "2", "2"],
  "grid_n": 256,
  "eps_log2": [-1, -2, -3, -4],
  "witnesses": ["flat_hats", "rescaled_bumps"],
  "ascent": {"restarts": 2, "iters": 5},
  "seed": 11
})";

}  // namespace

TEST_CASE("predict subcommand prints the rate") {
    RunResult r = run("predict --p 2 --q 2 --r 2 --regime arbitrary");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("rho=0.5") != std::string::npos);
    CHECK(r.output.find("optimal=true") != std::string::npos);

    RunResult c = run("predict --p 1 --q 1 --r 1 --regime curvature");
    CHECK(c.exit_code == 0);
    CHECK(c.output.find("rho=1") != std::string::npos);
    CHECK(c.output.find("optimal=true") != std::string::npos);
}

TEST_CASE("predict rejects exponents below one with exit code 2") {
    RunResult r = run("predict --p 0.5 --q 2 --r 2 --regime arbitrary");
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("exponents below 1 unsupported") != std::string::npos);
}

TEST_CASE("predict emits a CSV table for a triple list") {
    fs::path dir = scratch_dir();
    write_file(dir / "triples.json", R"([["2","2","2"],["1","1","2"],["inf","1","2"]])");
    RunResult r = run("--out " + (dir / "out").string() + " predict --regime curvature --triples " +
                      (dir / "triples.json").string());
    CHECK(r.exit_code == 0);
    std::string csv = read_file(dir / "out" / "predictions.csv");
    CHECK(csv.find("p,q,r,rho,optimal") == 0);
    CHECK(csv.find("inf,1,2,0.25") != std::string::npos);
}

TEST_CASE("sweep subcommand writes artifacts and a verdict") {
    fs::path dir = scratch_dir();
    write_file(dir / "cfg.json", kSweepConfig);
    RunResult r = run("--out " + (dir / "run1").string() + " sweep --config " +
                      (dir / "cfg.json").string());
    INFO(r.output);
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("VERDICT") != std::string::npos);
    CHECK(r.output.find("predicted=0.5") != std::string::npos);
    for (const char* f : {"results.csv", "fit.json", "plotdata.tsv", "manifest.json"})
        CHECK(fs::exists(dir / "run1" / f));

    // Reproducibility: identical config + seed => byte-identical artifacts.
    RunResult r2 = run("--out " + (dir / "run2").string() + " sweep --config " +
                       (dir / "cfg.json").string());
    CHECK(r2.exit_code == 0);
    for (const char* f : {"results.csv", "fit.json", "plotdata.tsv"})
        CHECK(read_file(dir / "run1" / f) == read_file(dir / "run2" / f));

    // NARROWBAND_OUT overrides --out.
    RunResult r3 = run("--out " + (dir / "ignored").string() + " sweep --config " +
                           (dir / "cfg.json").string(),
                       "NARROWBAND_OUT=" + (dir / "env_out").string());
    CHECK(r3.exit_code == 0);
    CHECK(fs::exists(dir / "env_out" / "results.csv"));
    CHECK_FALSE(fs::exists(dir / "ignored" / "results.csv"));
}

TEST_CASE("sweep rejects malformed configs with exit code 2 and a pointer") {
    fs::path dir = scratch_dir();
    write_file(dir / "bad.json", R"({"builder":"line","lambda":1,"regime":"line",
        "triple":["2","2","2"],"grid_n":256,"curve":{"kind":"pentagon"}})");
    RunResult r = run("sweep --config " + (dir / "bad.json").string());
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("/curve/kind") != std::string::npos);
}

TEST_CASE("mislabeled regime is caught as theorem-inconsistent (exit 3)") {
    // A degenerate line symbol probed under the non-degenerate prediction:
    // the measured decay eps^(1/4) cannot match the predicted eps^(1/2).
    fs::path dir = scratch_dir();
    write_file(dir / "wrong.json", R"({
      "builder": "line", "lambda": 0.0, "regime": "line",
      "triple": ["4", "4/3", "2"], "grid_n": 512,
      "eps_log2": [-2, -3, -4, -5],
      "witnesses": ["flat_hats", "dilation_product"],
      "ascent": {"restarts": 2, "iters": 6},
      "seed": 3
    })");
    RunResult r = run("--out " + (dir / "wrong_out").string() + " sweep --config " +
                      (dir / "wrong.json").string());
    INFO(r.output);
    CHECK(r.exit_code == 3);
    CHECK(r.output.find("VERDICT inconsistent") != std::string::npos);
}

TEST_CASE("verify-symbol prints a class table") {
    fs::path dir = scratch_dir();
    write_file(dir / "circle.json", R"({"kind":"circle","center":[0,1],"radius":1})");
    RunResult r = run("--grid-n 256 verify-symbol --curve " + (dir / "circle.json").string() +
                      " --class M_eps --eps 0.25 --eps 0.125");
    INFO(r.output);
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("epsilon,sup,") != std::string::npos);
    CHECK(r.output.find("true") != std::string::npos);

    // Resolution violation: eps below what the grid supports.
    RunResult bad = run("--grid-n 256 verify-symbol --curve " + (dir / "circle.json").string() +
                        " --class M_eps --eps 0.001");
    CHECK(bad.exit_code == 2);
    CHECK(bad.output.find("grid too coarse") != std::string::npos);
}
