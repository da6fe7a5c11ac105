#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "plate/config.hpp"
#include "plate/errors.hpp"
#include "plate/runner.hpp"

using namespace plate;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kSimulateConf =
    "grid.n = 1\n"
    "grid.N = 32\n"
    "grid.L = 10\n"
    "time.dt = 0.1\n"
    "time.K = 10\n"
    "nonlinear.lambda = 3\n"
    "data.u0.kind = random\n"
    "data.u0.k_max = 4\n"
    "data.u0.amplitude = 0.5\n";

} // namespace

TEST_CASE("CSV doubles round-trip through their shortest decimal form") {
    for (double v : {0.0, 1.0, 0.1, 1.0 / 3.0, 12345.6789, -2.5e17, 1e-300,
                     3.14159265358979323846})
        CHECK(std::strtod(format_csv_double(v).c_str(), nullptr) == v);
    CHECK(format_csv_double(1.0) == "1");
}

TEST_CASE("output root resolution order") {
    CHECK(resolve_out_root("explicit_dir") == fs::path("explicit_dir"));
    setenv("PLATE_OUT_ROOT", "from_env", 1);
    CHECK(resolve_out_root("") == fs::path("from_env"));
    CHECK(resolve_out_root("explicit_dir") == fs::path("explicit_dir"));
    unsetenv("PLATE_OUT_ROOT");
    CHECK(resolve_out_root("") == fs::path("runs"));
}

TEST_CASE("identical config and seed produce byte-identical outputs") {
    fs::path root = fs::path("runner_test_out") / "determinism";
    fs::remove_all(root);
    Config cfg = Config::parse_string(kSimulateConf);

    RunSummary a = run(cfg, "simulate", root, 7, 1);
    Config cfg2 = Config::parse_string(kSimulateConf);
    RunSummary b = run(cfg2, "simulate", root, 7, 1);
    CHECK(a.exit_code == 0);
    CHECK(b.exit_code == 0);
    CHECK(a.run_dir != b.run_dir); // second run claims a suffixed directory

    CHECK(slurp(a.run_dir / "norms.csv") == slurp(b.run_dir / "norms.csv"));

    CompareResult same = compare_runs(a.run_dir, b.run_dir, 0.0);
    CHECK(same.pass);
    CHECK(same.max_rel_dev == 0.0);

    // a different seed must actually change the data
    Config cfg3 = Config::parse_string(kSimulateConf);
    RunSummary c = run(cfg3, "simulate", root, 8, 1);
    CompareResult diff = compare_runs(a.run_dir, c.run_dir, 0.0);
    CHECK(!diff.pass);
    CHECK(diff.max_rel_dev > 0.0);

    fs::remove_all("runner_test_out");
}

TEST_CASE("every run directory carries the standard artifacts") {
    fs::path root = fs::path("runner_test_out") / "layout";
    fs::remove_all(root);
    Config cfg = Config::parse_string(kSimulateConf);
    RunSummary s = run(cfg, "simulate", root, 1, 1);

    CHECK(fs::exists(s.run_dir / "config.txt"));
    CHECK(fs::exists(s.run_dir / "norms.csv"));
    CHECK(fs::exists(s.run_dir / "reports.csv"));
    CHECK(fs::exists(s.run_dir / "fits.csv"));
    CHECK(fs::exists(s.run_dir / "summary.txt"));
    CHECK(fs::exists(s.run_dir / "plots.gp"));
    CHECK(fs::is_directory(s.run_dir / "plotdata"));
    CHECK(!fs::exists(s.run_dir / "FAILED"));

    std::string norms = slurp(s.run_dir / "norms.csv");
    CHECK(norms.rfind("t,linf,hs,hs_minus1,hsp,weighted_y,weighted_x,weighted_z\n",
                      0) == 0);
    // 11 time steps -> 11 rows + header
    int lines = 0;
    for (char ch : norms)
        if (ch == '\n') ++lines;
    CHECK(lines == 12);

    std::string snapshot = slurp(s.run_dir / "config.txt");
    CHECK(snapshot == cfg.source_text());

    fs::remove_all("runner_test_out");
}

TEST_CASE("the residual option is consumed and reported") {
    fs::path root = fs::path("runner_test_out") / "residual";
    fs::remove_all(root);
    Config cfg = Config::parse_string(std::string(kSimulateConf) +
                                      "simulate.residual = true\n");
    RunSummary s = run(cfg, "simulate", root, 1, 1);
    CHECK(s.exit_code == 0);
    std::string summary = slurp(s.run_dir / "summary.txt");
    CHECK(summary.find("max H^-2 residual") != std::string::npos);
    fs::remove_all("runner_test_out");
}

TEST_CASE("unknown config keys abort a run before it starts computing") {
    fs::path root = fs::path("runner_test_out") / "unknown_key";
    fs::remove_all(root);
    Config cfg = Config::parse_string(std::string(kSimulateConf) +
                                      "grid.resolution = 99\n");
    CHECK_THROWS_WITH_AS(run(cfg, "simulate", root, 1, 1),
                         doctest::Contains("grid.resolution"), ConfigError);
    // the aborted run leaves a FAILED marker behind
    CHECK(fs::exists(root / "simulate" / "FAILED"));
    fs::remove_all("runner_test_out");
}

TEST_CASE("unknown experiments are rejected") {
    fs::path root = fs::path("runner_test_out") / "unknown_exp";
    fs::remove_all(root);
    Config cfg = Config::parse_string(kSimulateConf);
    CHECK_THROWS_AS(run(cfg, "frobnicate", root, 1, 1), ConfigError);
    fs::remove_all("runner_test_out");
}

TEST_CASE("the sweep experiment fans out sub-runs and aggregates exit codes") {
    fs::path root = fs::path("runner_test_out") / "sweep";
    fs::remove_all(root);
    Config cfg = Config::parse_string(std::string(kSimulateConf) +
                                      "sweep.key = grid.N\n"
                                      "sweep.values = 32, 64\n"
                                      "sweep.experiment = simulate\n");
    RunSummary s = run(cfg, "sweep", root, 3, 2);
    CHECK(s.exit_code == 0);
    CHECK(fs::exists(s.run_dir / "item-0" / "norms.csv"));
    CHECK(fs::exists(s.run_dir / "item-1" / "norms.csv"));

    // the swept key actually differs between items
    std::string c0 = slurp(s.run_dir / "item-0" / "config.txt");
    std::string c1 = slurp(s.run_dir / "item-1" / "config.txt");
    CHECK(c0.find("grid.N = 32") != std::string::npos);
    CHECK(c1.find("grid.N = 64") != std::string::npos);
    fs::remove_all("runner_test_out");
}

TEST_CASE("the compare experiment wires compare_runs into the CLI surface") {
    fs::path root = fs::path("runner_test_out") / "cmp";
    fs::remove_all(root);
    Config cfg = Config::parse_string(kSimulateConf);
    RunSummary a = run(cfg, "simulate", root, 7, 1);
    Config cfg2 = Config::parse_string(kSimulateConf);
    RunSummary b = run(cfg2, "simulate", root, 7, 1);

    std::ostringstream conf;
    conf << "compare.a = " << a.run_dir.string() << "\n"
         << "compare.b = " << b.run_dir.string() << "\n"
         << "compare.tolerance = 0\n";
    Config ccfg = Config::parse_string(conf.str());
    RunSummary cmp = run(ccfg, "compare", root, 1, 1);
    CHECK(cmp.exit_code == 0);
    fs::remove_all("runner_test_out");
}
