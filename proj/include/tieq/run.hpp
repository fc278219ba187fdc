#pragma once

#include <string>
#include <vector>

#include "tieq/anneal.hpp"
#include "tieq/fixedpoint.hpp"
#include "tieq/model.hpp"

namespace tieq {

enum class Command { solve, anneal, bridge, verify, scan };

struct RunConfig {
    Command command = Command::solve;
    std::string model_path;
    Mode mode = Mode::dt;
    double lambda = 0.1; // solve
    AnnealSchedule schedule;
    SolverConfig solver;
    CertificateThresholds thresholds;
    int multistart = 0; // number of random extra starts
    std::uint64_t seed = 0;
    double bridge_lambda = 0.1;
    std::vector<double> bridge_h;
    double scan_tol = 1e-7;
    std::size_t scan_cap = 1000000;
    std::string out_dir = "out";
};

// Reads a config file; relative model paths resolve against the config's
// directory. out_override, when nonempty, replaces the configured directory.
RunConfig load_run_config(const std::string& path, Command command,
                          const std::string& out_override);

// Executes the run and writes report.json, run_meta.json (timestamp sidecar)
// and series/*.csv under the output directory. Returns the process exit code:
// 0 success, 2 certification failure.
int run(const RunConfig& config);

} // namespace tieq
