#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "mesodpp/cli.hpp"

using namespace meso;
using namespace meso::cli;
namespace fs = std::filesystem;

TEST_CASE("config round-trips through its file representation losslessly") {
    ExperimentConfig cfg;
    cfg.command = "clt";
    cfg.ensemble = "cue";
    cfg.N = 256;
    cfg.N_list = {64, 128, 256};
    cfg.alpha = 0.37;
    cfg.x0 = 0.125;
    cfg.function_id = "g_t";
    cfg.f_t = 1.5;
    cfg.f_eta = 0.75;
    cfg.M = 1234;
    cfg.seed = 99;
    cfg.samples = 7;
    cfg.threads = 3;
    cfg.eta = 2.0;
    cfg.time_grid = {0.25, 0.5, 1.0, 2.0};
    cfg.L = 3.5;
    cfg.grid_n = 21;
    cfg.out_dir = "/tmp/somewhere";
    cfg.tag = "roundtrip";
    cfg.tol_k2_rel = 0.1;
    cfg.ks_threshold = 0.03;
    const std::string text = serialize_config(cfg);
    ExperimentConfig back = parse_config_text(text);
    CHECK(back == cfg);
    CHECK(serialize_config(back) == text);
}

TEST_CASE("config parsing errors") {
    CHECK_THROWS_AS(parse_config_text("nonsense line without equals\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("[model\nN = 3\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("[model]\nbogus_key = 3\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("[model]\nN = not_a_number\n"), std::invalid_argument);
    ExperimentConfig cfg;
    CHECK_THROWS_AS(apply_override(cfg, "no.such.key", "1"), std::invalid_argument);
    apply_override(cfg, "model.alpha", "0.75");
    CHECK(cfg.alpha == 0.75);
    // comments and blank lines are fine
    ExperimentConfig ok = parse_config_text("# a comment\n\ncommand = mcl\n");
    CHECK(ok.command == "mcl");
}

TEST_CASE("make_test_function covers the built-in family") {
    ExperimentConfig cfg;
    for (const char* id : {"bump", "gaussian", "mollified_step", "g_t", "x", "x^2"}) {
        cfg.function_id = id;
        TestFunction f = make_test_function(cfg);
        CHECK(!f.name.empty());
    }
    cfg.function_id = "nope";
    CHECK_THROWS_AS(make_test_function(cfg), std::invalid_argument);
}

static CumulantReport sample_report() {
    CumulantReport r;
    r.ensemble = "gue";
    r.function_name = "bump";
    r.N = 100;
    r.alpha = 0.5;
    r.x0 = 0.1;
    r.M = 1000;
    r.seed = SeedStream{7, 0};
    r.mean = 3.14159;
    r.kstats.k1 = 3.14159;
    r.kstats.k2 = 0.21;
    r.kstats.k3 = -0.001;
    r.kstats.k4 = 0.002;
    r.kstats.se1 = 0.01;
    r.kstats.se2 = 0.005;
    r.kstats.se3 = 0.003;
    r.kstats.se4 = 0.004;
    r.kstats.M = 1000;
    r.target_variance = 0.2108;
    r.exact_c2 = 0.2107;
    return r;
}

TEST_CASE("report serialization: determinism, column order, json round trip") {
    CumulantReport r = sample_report();
    CHECK(emit_report(r, ReportFormat::csv) == emit_report(r, ReportFormat::csv));
    CHECK(emit_report(r, ReportFormat::json_doc) == emit_report(r, ReportFormat::json_doc));
    CHECK(emit_report(r, ReportFormat::text) == emit_report(r, ReportFormat::text));
    const std::string csv = report_csv(r);
    CHECK(csv.rfind("ensemble,function,N,alpha,x0,M,seed_root,seed_index,mean,k1,k2,k3,k4,", 0) ==
          0);
    CumulantReport back = report_from_json(report_json(r));
    CHECK(back.ensemble == r.ensemble);
    CHECK(back.N == r.N);
    CHECK(back.kstats.k2 == r.kstats.k2);
    CHECK(back.kstats.se4 == r.kstats.se4);
    CHECK(back.target_variance == r.target_variance);
    REQUIRE(back.exact_c2.has_value());
    CHECK(*back.exact_c2 == *r.exact_c2);
    CHECK(!back.exact_c3.has_value());
    CHECK(report_csv(back) == csv);
}

TEST_CASE("run_experiment: mcl identities pass by default") {
    ExperimentConfig cfg;
    cfg.command = "mcl";
    RunArtifacts art = run_experiment(cfg);
    CHECK(art.pass);
    CHECK(art.csv.rfind("n,max_abs_error\n", 0) == 0);
    CHECK(art.text.find("[PASS]") != std::string::npos);
    ExperimentConfig bad = cfg;
    bad.command = "unknown-cmd";
    CHECK_THROWS_AS(run_experiment(bad), std::invalid_argument);
}

TEST_CASE("end-to-end determinism: 1 worker and 8 workers, identical CSV") {
    ExperimentConfig cfg;
    cfg.command = "clt";
    cfg.N = 40;
    cfg.M = 200;
    cfg.alpha = 0.5;
    cfg.x0 = 0.1;
    cfg.seed = 31;
    cfg.threads = 1;
    RunArtifacts one = run_experiment(cfg);
    cfg.threads = 8;
    RunArtifacts eight = run_experiment(cfg);
    CHECK(one.csv == eight.csv);
}

TEST_CASE("run_cli exit codes and artifact files") {
    const fs::path dir = fs::temp_directory_path() / "mesodpp_cli_test";
    fs::remove_all(dir);

    auto run = [](std::vector<const char*> args) {
        args.insert(args.begin(), "meso-dpp");
        return run_cli((int)args.size(), args.data());
    };

    CHECK(run({}) == exit_usage);
    CHECK(run({"frobnicate"}) == exit_usage);
    CHECK(run({"clt", "--bogus-flag"}) == exit_usage);
    CHECK(run({"clt", "--set", "novalue"}) == exit_usage);

    // malformed config: exit 2 and no partial outputs
    const fs::path badcfg = dir / "bad.cfg";
    fs::create_directories(dir);
    std::ofstream(badcfg) << "[model]\nN = banana\n";
    CHECK(run({"mcl", "--config", badcfg.string().c_str(), "--out",
               (dir / "badout").string().c_str()}) == exit_config);
    CHECK(!fs::exists(dir / "badout"));

    // healthy run: exit 0 and all three artifacts
    CHECK(run({"mcl", "--out", (dir / "ok").string().c_str(), "--seed", "5"}) == exit_ok);
    CHECK(fs::exists(dir / "ok" / "run_mcl.csv"));
    CHECK(fs::exists(dir / "ok" / "run_mcl.json"));
    CHECK(fs::exists(dir / "ok" / "run_mcl.txt"));

    // failed tolerance: exit 3 (numeric), artifacts still written
    CHECK(run({"kernel-error", "--out", (dir / "fail").string().c_str(), "--set",
               "model.N_list=64,128,256", "--set", "tolerances.slope=1e-9"}) == exit_numeric);
    CHECK(fs::exists(dir / "fail" / "run_kernel-error.csv"));

    fs::remove_all(dir);
}

TEST_CASE("config file + overrides drive run_cli") {
    const fs::path dir = fs::temp_directory_path() / "mesodpp_cli_cfg";
    fs::remove_all(dir);
    fs::create_directories(dir);
    ExperimentConfig cfg;
    cfg.command = "mcl";
    cfg.seed = 17;
    cfg.out_dir = (dir / "out").string();
    cfg.tag = "cfgdrv";
    const fs::path file = dir / "exp.cfg";
    std::ofstream(file) << serialize_config(cfg);
    std::vector<const char*> args{"meso-dpp", "mcl", "--config", nullptr, "--set",
                                  "tolerances.mcl=1e-10"};
    const std::string fstr = file.string();
    args[3] = fstr.c_str();
    CHECK(run_cli((int)args.size(), args.data()) == exit_ok);
    CHECK(fs::exists(dir / "out" / "cfgdrv_mcl.json"));
    fs::remove_all(dir);
}
