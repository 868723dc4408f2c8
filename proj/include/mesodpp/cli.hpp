#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mesodpp/charpoly.hpp"
#include "mesodpp/statistics.hpp"

namespace meso::cli {

inline constexpr const char* kVersion = "0.1.0";

// Exit codes: 0 ok, 1 usage, 2 config, 3 numeric failure, 4 I/O.
enum ExitCode { exit_ok = 0, exit_usage = 1, exit_config = 2, exit_numeric = 3, exit_io = 4 };

struct ExperimentConfig {
    std::string command;
    std::string ensemble = "gue";
    int N = 100;
    std::vector<int> N_list;
    double alpha = 0.5;
    double x0 = 0.0;
    std::string function_id = "bump";  // bump|gaussian|mollified_step|g_t|x|x^2
    double f_t = 1.0, f_eta = 1.0;     // g_t parameters
    std::uint64_t M = 1000;
    std::uint64_t seed = 1;
    std::uint64_t samples = 16;  // `sample` command
    double eta = 1.0;
    std::vector<double> time_grid{0.5, 1.0, 2.0};
    double L = 2.0;
    int grid_n = 33;
    int threads = 0;
    std::string out_dir = ".";
    std::string tag = "run";

    // pass/fail tolerances; defaults mirror the acceptance suite
    double tol_k2_rel = 0.15;
    double tol_se_mult = 4.0;
    double tol_slope = 0.2;
    double tol_pr_slope = 0.3;
    double tol_identity = 1e-8;
    double tol_mcl = 1e-12;
    double ks_threshold = 0.05;

    bool operator==(const ExperimentConfig&) const = default;
};

// key = value lines with [section] headers flattened to "section.key".
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);
std::string serialize_config(const ExperimentConfig& cfg);  // lossless round trip
void apply_override(ExperimentConfig& cfg, const std::string& key, const std::string& value);

TestFunction make_test_function(const ExperimentConfig& cfg);

// Every run emits a CSV data file, a JSON metadata sidecar and a text summary.
struct RunArtifacts {
    std::string csv;
    std::string json_meta;
    std::string text;
    bool pass = false;
    double wall_seconds = 0.0;
};

RunArtifacts run_experiment(const ExperimentConfig& cfg);

// CumulantReport serialization (fixed column order, 17 significant digits).
std::string report_csv(const CumulantReport& r);
std::string report_json(const CumulantReport& r);
std::string report_text(const CumulantReport& r);
CumulantReport report_from_json(const std::string& doc);

enum class ReportFormat { csv, json_doc, text };
std::string emit_report(const CumulantReport& r, ReportFormat format);

std::string format17(double v);

// Full command-line entry point (flag parsing, file output, exit codes).
int run_cli(int argc, const char* const* argv);

}  // namespace meso::cli
