#include "tieq/run.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "tieq/bridge.hpp"
#include "tieq/entropy_gibbs.hpp"
#include "tieq/errors.hpp"
#include "tieq/eval_ct.hpp"
#include "tieq/eval_dt.hpp"
#include "tieq/model_io.hpp"
#include "tieq/verify.hpp"

namespace tieq {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string fmt17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void write_file(const fs::path& path, const std::string& body) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << body;
}

json policy_json(const RelaxedPolicy& pi) {
    json rows = json::array();
    for (const auto& row : pi.rho) rows.push_back(row);
    return rows;
}

json certificate_json(const Certificate& c) {
    return json{{"deviation_gap", c.deviation_gap},
                {"off_support_mass", c.off_support_mass},
                {"self_consistency", c.self_consistency},
                {"support_gap_tol", c.support_gap_tol},
                {"soundness_bound", c.soundness_bound},
                {"passed", c.passed}};
}

json fixed_point_json(const FixedPointReport& r, bool with_trace) {
    json j{{"converged", r.converged},
           {"iterations", r.iterations},
           {"residual", r.residual},
           {"y", r.y}};
    if (with_trace) {
        json trace = json::array();
        for (const auto& [it, res] : r.trace) trace.push_back(json::array({it, res}));
        j["trace"] = std::move(trace);
    }
    return j;
}

std::string mode_name(Mode m) { return m == Mode::dt ? "dt" : "ct"; }

} // namespace

RunConfig load_run_config(const std::string& path, Command command,
                          const std::string& out_override) {
    const json j = load_json_file(path);
    RunConfig cfg;
    cfg.command = command;

    if (!j.contains("model") || !j.at("model").is_string())
        throw ConfigError("/model", "expected a path string");
    fs::path model_path = j.at("model").get<std::string>();
    if (model_path.is_relative()) model_path = fs::path(path).parent_path() / model_path;
    cfg.model_path = model_path.string();

    if (!j.contains("mode") || !j.at("mode").is_string())
        throw ConfigError("/mode", "expected 'dt' or 'ct'");
    const std::string mode = j.at("mode").get<std::string>();
    if (mode == "dt")
        cfg.mode = Mode::dt;
    else if (mode == "ct")
        cfg.mode = Mode::ct;
    else
        throw ConfigError("/mode", "expected 'dt' or 'ct'");

    if (j.contains("lambda")) cfg.lambda = j.at("lambda").get<double>();
    if (j.contains("schedule")) {
        const json& s = j.at("schedule");
        cfg.schedule.lambda0 = s.value("lambda0", cfg.schedule.lambda0);
        cfg.schedule.factor = s.value("factor", cfg.schedule.factor);
        cfg.schedule.lambda_min = s.value("lambda_min", cfg.schedule.lambda_min);
    }
    if (j.contains("solver")) {
        const json& s = j.at("solver");
        cfg.solver.theta = s.value("theta", cfg.solver.theta);
        cfg.solver.tol = s.value("tol", cfg.solver.tol);
        cfg.solver.max_iter = s.value("max_iter", cfg.solver.max_iter);
        cfg.solver.anderson = s.value("anderson", cfg.solver.anderson);
        cfg.solver.diagnostics = s.value("diagnostics", cfg.solver.diagnostics);
        cfg.multistart = s.value("multistart", cfg.multistart);
        cfg.seed = s.value("seed", cfg.seed);
    }
    if (j.contains("thresholds")) {
        const json& t = j.at("thresholds");
        cfg.thresholds.max_deviation_gap =
            t.value("deviation_gap", cfg.thresholds.max_deviation_gap);
        cfg.thresholds.max_off_support_mass =
            t.value("off_support_mass", cfg.thresholds.max_off_support_mass);
        cfg.thresholds.max_self_consistency =
            t.value("self_consistency", cfg.thresholds.max_self_consistency);
        cfg.thresholds.support_gap_tol =
            t.value("support_gap_tol", cfg.thresholds.support_gap_tol);
    }
    if (j.contains("bridge")) {
        const json& b = j.at("bridge");
        cfg.bridge_lambda = b.value("lambda", cfg.bridge_lambda);
        if (b.contains("h_list")) cfg.bridge_h = b.at("h_list").get<std::vector<double>>();
    }
    if (j.contains("scan")) {
        const json& s = j.at("scan");
        cfg.scan_tol = s.value("tol", cfg.scan_tol);
        cfg.scan_cap = s.value("cap", cfg.scan_cap);
    }
    if (j.contains("out")) {
        fs::path out = j.at("out").get<std::string>();
        if (out.is_relative()) out = fs::path(path).parent_path() / out;
        cfg.out_dir = out.string();
    }
    if (!out_override.empty()) cfg.out_dir = out_override;
    return cfg;
}

int run(const RunConfig& config) {
    const ModelSpec model = load_model(config.model_path);
    const ValidationReport validation = validate_model(model);
    if (!validation.passed) {
        std::string what = "model validation failed:";
        for (const auto& v : validation.violations) what += " [" + v.code + " at " + v.where + "]";
        throw Error(what);
    }

    const fs::path out_dir(config.out_dir);
    fs::create_directories(out_dir / "series");

    json report;
    report["mode"] = mode_name(config.mode);
    report["model"] = config.model_path;
    report["validation"] = {{"passed", true}, {"theta_estimate", validation.theta_estimate}};
    int exit_code = 0;

    switch (config.command) {
    case Command::solve: {
        report["command"] = "solve";
        std::vector<ValueVector> starts{ValueVector(model.states, 0.0)};
        if (config.multistart > 0) {
            auto extra = default_starts(model, config.lambda, config.multistart, config.seed);
            starts.insert(starts.end(), extra.begin(), extra.end());
        }
        const FixedPointReport rep =
            solve_multistart(starts, config.lambda, model, config.mode, config.solver);
        report["result"] = fixed_point_json(rep, false);
        report["result"]["lambda"] = config.lambda;
        report["result"]["policy"] =
            policy_json(gibbs_policy(rep.y, config.lambda, model, config.mode));
        std::string csv = "iteration,residual\n";
        for (const auto& [it, res] : rep.trace)
            csv += std::to_string(it) + "," + fmt17(res) + "\n";
        write_file(out_dir / "series" / "residuals.csv", csv);
        if (!rep.converged) exit_code = 2;
        break;
    }
    case Command::anneal: {
        report["command"] = "anneal";
        const AnnealReport rep = solve_annealed(model, config.mode, config.schedule,
                                                config.solver, config.thresholds);
        json stages = json::array();
        std::string csv = "stage,lambda,gap\n";
        for (std::size_t s = 0; s < rep.stages.size(); ++s) {
            const AnnealStage& st = rep.stages[s];
            stages.push_back(json{{"lambda", st.lambda},
                                  {"converged", st.report.converged},
                                  {"iterations", st.report.iterations},
                                  {"residual", st.report.residual},
                                  {"deviation_gap", st.deviation_gap},
                                  {"off_support_mass", st.off_support_mass},
                                  {"damping_retries", st.damping_retries}});
            csv += std::to_string(s) + "," + fmt17(st.lambda) + "," + fmt17(st.deviation_gap) + "\n";
        }
        report["result"] = {{"stages", std::move(stages)},
                            {"final_value", rep.final_value},
                            {"aux_value", rep.aux_value},
                            {"final_policy", policy_json(rep.final_policy)},
                            {"all_converged", rep.all_converged},
                            {"certificate", certificate_json(rep.certificate)}};
        write_file(out_dir / "series" / "stages.csv", csv);
        if (!rep.certificate.passed) exit_code = 2;
        break;
    }
    case Command::bridge: {
        report["command"] = "bridge";
        if (config.mode != Mode::ct)
            throw Error("bridge runs start from a continuous-time model");
        const BridgeReport rep =
            convergence_study(model, config.bridge_lambda, config.bridge_h, config.solver);
        json rows = json::array();
        std::string csv = "h,discrepancy\n";
        for (const BridgeRow& row : rep.rows) {
            rows.push_back(json{{"h", row.h},
                                {"value_gap", row.value_gap},
                                {"policy_gap", row.policy_gap},
                                {"converged", row.converged}});
            csv += fmt17(row.h) + "," + fmt17(row.value_gap) + "\n";
        }
        report["result"] = {{"lambda", config.bridge_lambda},
                            {"ct", fixed_point_json(rep.ct_report, false)},
                            {"rows", std::move(rows)}};
        write_file(out_dir / "series" / "bridge.csv", csv);
        break;
    }
    case Command::verify: {
        report["command"] = "verify";
        const AnnealReport rep = solve_annealed(model, config.mode, config.schedule,
                                                config.solver, config.thresholds);
        const DeviationResult dev =
            deviation_test(rep.final_policy, rep.aux_value, 0.0, model, config.mode);
        report["result"] = {{"certificate", certificate_json(rep.certificate)},
                            {"final_value", rep.final_value},
                            {"deviation", {{"max_gap", dev.max_gap}, {"per_state", dev.per_state}}}};
        if (model.reward.discount().family() == Discount::Family::Exponential &&
            model.reward.separable_form()) {
            const BellmanReport bell = bellman_consistency(model, rep, 1e-6);
            report["result"]["bellman"] = {{"optimal", bell.optimal},
                                           {"gap", bell.gap},
                                           {"within", bell.within}};
        } else {
            report["result"]["bellman"] = nullptr;
        }
        if (!rep.certificate.passed) exit_code = 2;
        break;
    }
    case Command::scan: {
        report["command"] = "scan";
        const auto found =
            standard_equilibrium_scan(model, config.mode, config.scan_tol, config.scan_cap);
        json list = json::array();
        for (const auto& alpha : found) {
            json nodes = json::array();
            for (std::size_t k : alpha) nodes.push_back(k);
            list.push_back(std::move(nodes));
        }
        report["standard_equilibria"] = std::move(list);
        report["result"] = {{"count", found.size()}, {"tol", config.scan_tol}};
        break;
    }
    }

    write_file(out_dir / "report.json", report.dump(2) + "\n");

    // Timestamps live in a sidecar so report.json stays byte-stable across runs.
    const auto now = std::chrono::system_clock::now().time_since_epoch();
    json meta{{"unix_ms", std::chrono::duration_cast<std::chrono::milliseconds>(now).count()}};
    write_file(out_dir / "run_meta.json", meta.dump(2) + "\n");
    return exit_code;
}

} // namespace tieq
