#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "rhc/checks.hpp"
#include "rhc/cli.hpp"
#include "rhc/io.hpp"
#include "rhc/taylor.hpp"

using namespace rhc;
namespace fs = std::filesystem;

namespace {

// Fresh scratch directory per process run.
fs::path scratch() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "rhc_io_cli_test";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

fs::path write_file(const std::string& name, const std::string& content) {
    const fs::path p = scratch() / name;
    std::ofstream f(p, std::ios::binary);
    f << content;
    return p;
}

fs::path benchmark_file() {
    static const fs::path p = [] {
        const fs::path path = scratch() / "system.json";
        save_system(benchmark_system(), path.string());
        return path;
    }();
    return p;
}

std::string run_json(const std::string& extra = "") {
    return std::string("{\n"
                       "  \"system\": \"system.json\",\n"
                       "  \"y0\": [1.0, 1.0],\n"
                       "  \"tau\": 0.5,\n"
                       "  \"T\": 1.0,\n"
                       "  \"L\": 2.0") +
           (extra.empty() ? "" : ",\n  " + extra) + "\n}\n";
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream buf;
    buf << f.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("system files round-trip exactly") {
    const BilinearSystem sys = benchmark_system();
    const fs::path p = scratch() / "roundtrip.json";
    save_system(sys, p.string());
    const BilinearSystem back = load_system(p.string());
    CHECK((back.A - sys.A).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.B - sys.B).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.N - sys.N).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.C - sys.C).cwiseAbs().maxCoeff() == 0.0);
    CHECK(back.alpha == sys.alpha);
}

TEST_CASE("system loader rejects bad files") {
    CHECK_THROWS_AS(load_system((scratch() / "missing.json").string()), IoError);

    const fs::path garbled = write_file("garbled.json", "{not json");
    CHECK_THROWS_AS(load_system(garbled.string()), IoError);

    const fs::path no_alpha = write_file(
        "no_alpha.json",
        R"({"A": [[1.0]], "B": [1.0], "N": [[0.0]], "C": [[1.0]]})");
    CHECK_THROWS_AS(load_system(no_alpha.string()), IoError);

    // Structurally valid JSON whose dimensions disagree fails validation.
    const fs::path bad_dims = write_file(
        "bad_dims.json",
        R"({"A": [[1.0, 0.0], [0.0, -1.0]], "B": [1.0, 1.0, 1.0],
            "N": [[0.0, 0.0], [0.0, 0.0]], "C": [[1.0, 0.0], [0.0, 1.0]],
            "alpha": 0.1})");
    CHECK_THROWS_AS(load_system(bad_dims.string()), InvalidInputError);
}

TEST_CASE("run configs resolve the system path relative to themselves") {
    benchmark_file();  // writes scratch()/system.json
    const fs::path cfg = write_file("run.json", run_json());
    const RunConfig rc = load_run_config(cfg.string());
    CHECK((rc.system.A - benchmark_system().A).cwiseAbs().maxCoeff() == 0.0);
    CHECK(rc.y0.size() == 2);
    CHECK(rc.cfg.tau == 0.5);
    CHECK(rc.cfg.T == 1.0);
    CHECK(rc.cfg.L == 2.0);
    // Default penalty: quadratic Taylor term of the value function.
    CHECK(rc.cfg.phi.kind == TerminalPenalty::Kind::taylor2);
    CHECK(eval_penalty(rc.cfg.phi, rc.y0) == doctest::Approx(0.2679449472));
}

TEST_CASE("dotted-path overrides rewrite the parsed config") {
    benchmark_file();
    const fs::path cfg = write_file("run_override.json", run_json());

    const RunConfig rc = load_run_config(
        cfg.string(),
        {"solver.h=0.002", "phi.kind=zero", "T=2.5", "y0=[2, 3]"});
    CHECK(rc.cfg.opts.h == 0.002);
    CHECK(rc.cfg.phi.kind == TerminalPenalty::Kind::zero);
    CHECK(rc.cfg.T == 2.5);
    REQUIRE(rc.y0.size() == 2);
    CHECK(rc.y0[0] == 2.0);
    CHECK(rc.y0[1] == 3.0);

    CHECK_THROWS_AS(load_run_config(cfg.string(), {"no_equals"}), IoError);
    CHECK_THROWS_AS(load_run_config(cfg.string(), {"=value"}), IoError);
    CHECK_THROWS_AS(load_run_config(cfg.string(), {"a..b=1"}), IoError);
}

TEST_CASE("sweep specs load, default their penalties, and validate") {
    benchmark_file();
    const fs::path cfg = write_file(
        "sweep.json",
        R"({"system": "system.json", "y0": [1.0, 1.0],
            "tau_values": [0.4], "T_values": [0.4, 1.0],
            "penalties": [2], "L": 5.0, "solver": {"h": 0.01}})");
    const SweepSpec spec = load_sweep_spec(cfg.string());
    CHECK(spec.tau_values == std::vector<double>{0.4});
    CHECK(spec.T_values == std::vector<double>{0.4, 1.0});
    REQUIRE(spec.penalties.size() == 1);
    CHECK(spec.penalties[0] == PenaltyOrder::k2);
    CHECK(spec.opts.h == 0.01);

    const SweepSpec all = load_sweep_spec(cfg.string(), {"penalties=[1,2,3]"});
    CHECK(all.penalties.size() == 3);

    CHECK_THROWS_AS(load_sweep_spec(cfg.string(), {"penalties=[4]"}), IoError);
    CHECK_THROWS_AS(load_sweep_spec(cfg.string(), {"tau_values=[0.4,0.4]"}),
                    InvalidInputError);
}

TEST_CASE("riccati command: success and config-error exit codes") {
    CliOptions opt;
    opt.config_path = benchmark_file().string();
    CHECK(cmd_riccati(opt) == kExitOk);

    opt.config_path = (scratch() / "missing.json").string();
    CHECK(cmd_riccati(opt) == kExitConfigError);
}

TEST_CASE("solve command writes a trajectory and reports failures") {
    benchmark_file();
    const fs::path cfg = write_file("run_solve.json", run_json());
    CliOptions opt;
    opt.config_path = cfg.string();
    opt.out_dir = (scratch() / "solve_out").string();
    CHECK(cmd_solve(opt) == kExitOk);

    const fs::path csv = fs::path(opt.out_dir) / "solution.csv";
    REQUIRE(fs::exists(csv));
    const std::string text = slurp(csv);
    CHECK(text.rfind("t,u,y0,y1\n", 0) == 0);
    // 100 steps on (0, 1) at h = 0.01: header + 101 node rows.
    CHECK(std::count(text.begin(), text.end(), '\n') == 102);

    // An unconverged solve is a numerical failure, not a config error.
    CHECK(cmd_solve([&] {
              CliOptions o = opt;
              o.overrides = {"solver.max_iters=1"};
              return o;
          }()) == kExitNumericalError);
}

TEST_CASE("rhc command: full runs exit 0, stalled windows exit 3") {
    benchmark_file();
    const fs::path cfg = write_file("run_rhc.json", run_json());
    CliOptions opt;
    opt.config_path = cfg.string();
    opt.out_dir = (scratch() / "rhc_out").string();
    CHECK(cmd_rhc(opt) == kExitOk);
    CHECK(fs::exists(fs::path(opt.out_dir) / "rhc_trajectory.csv"));

    CliOptions stalled = opt;
    stalled.overrides = {"solver.max_iters=1"};
    stalled.out_dir = (scratch() / "rhc_partial").string();
    CHECK(cmd_rhc(stalled) == kExitPartial);
}

TEST_CASE("tables command exports tables, offsets, and a summary") {
    benchmark_file();
    const fs::path cfg = write_file(
        "sweep_small.json",
        R"({"system": "system.json", "y0": [1.0, 1.0],
            "tau_values": [1.0], "T_values": [1.0],
            "penalties": [2], "L": 5.0, "solver": {"h": 0.002}})");
    CliOptions opt;
    opt.config_path = cfg.string();
    opt.out_dir = (scratch() / "tables_out").string();
    opt.format = "md";
    CHECK(cmd_tables(opt) == kExitOk);

    const fs::path out(opt.out_dir);
    for (const char* name :
         {"error_k2.csv", "error_k2.md", "rho_k2.csv", "rho_k2.md",
          "summary.txt"}) {
        CHECK(fs::exists(out / name));
    }
    const std::string summary = slurp(out / "summary.txt");
    CHECK(summary.find("PASS monotonicity k=2") != std::string::npos);
    CHECK(summary.find("PASS rho-variation rho(k=2)") != std::string::npos);
    CHECK(summary.find("FAIL") == std::string::npos);

    const SweepTable back =
        import_table_csv((out / "error_k2.csv").string());
    CHECK(back.label == "k=2");
    REQUIRE(back.has_value(0, 0));
    CHECK(back.value(0, 0) > 0.0);

    CliOptions bad = opt;
    bad.config_path = (scratch() / "missing.json").string();
    CHECK(cmd_tables(bad) == kExitConfigError);
}

TEST_CASE("log level comes from the environment, read once") {
    // The suite runs without RHC_LOG set, so the cached level is `error`;
    // changing the environment afterwards must not change the cached value.
    CHECK(log_level() == LogLevel::error);
    setenv("RHC_LOG", "debug", 1);
    CHECK(log_level() == LogLevel::error);
    unsetenv("RHC_LOG");
    log_info("suppressed");   // must not crash either way
    log_debug("suppressed");
}
