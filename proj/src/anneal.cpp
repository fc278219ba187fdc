#include "tieq/anneal.hpp"

#include <algorithm>
#include <cmath>

#include "tieq/entropy_gibbs.hpp"
#include "tieq/errors.hpp"
#include "tieq/eval_ct.hpp"
#include "tieq/eval_dt.hpp"

namespace tieq {

std::vector<std::size_t> extract_support(const ValueVector& y, int state,
                                         const ModelSpec& model, Mode mode, double gap_tol) {
    if (!(gap_tol > 0.0)) throw Precondition("gap tolerance must be positive");
    const ObjectiveRow row = one_step_objective(model, mode, y, state);
    std::vector<std::size_t> nodes;
    for (std::size_t k = 0; k < row.size(); ++k)
        if (row.gap_from_max(k) >= -gap_tol) nodes.push_back(k);
    return nodes;
}

double default_support_gap_tol(const ValueVector& y, const ModelSpec& model,
                               double lambda_hint) {
    const double base = 1e-6 * (1.0 + inf_norm(y) * model.theta());
    if (lambda_hint > 0.0)
        return std::max(base, lambda_hint * (1.0 + std::abs(std::log(lambda_hint))));
    return base;
}

Certificate certify(const RelaxedPolicy& pi, const ValueVector& y, const ModelSpec& model,
                    Mode mode, const CertificateThresholds& thresholds, double lambda_hint) {
    check_policy(pi, model);
    Certificate cert;
    cert.support_gap_tol = thresholds.support_gap_tol > 0.0
                               ? thresholds.support_gap_tol
                               : default_support_gap_tol(y, model, lambda_hint);
    for (int i = 0; i < model.states; ++i) {
        const ObjectiveRow row = one_step_objective(model, mode, y, i);
        Compensated value;
        double off_mass = 0.0;
        for (std::size_t k = 0; k < row.size(); ++k) {
            const double mass = model.grid.weights[k] * pi.rho[i][k];
            value.add_product(mass, row.value(k));
            if (row.gap_from_max(k) < -cert.support_gap_tol) off_mass += mass;
        }
        cert.deviation_gap = std::max(cert.deviation_gap, row.max_value() - value.value());
        cert.off_support_mass = std::max(cert.off_support_mass, off_mass);
    }
    const ValueVector recomputed = mode == Mode::dt ? value_dt(pi, 0.0, 1, model, 1e-11)
                                                    : value_ct(pi, 0.0, 0.0, model, 1e-11);
    cert.self_consistency = inf_dist(recomputed, y);
    cert.soundness_bound = cert.deviation_gap + model.theta() * (1.0 + two_norm(y)) *
                                                    cert.off_support_mass * grid_diameter(model.grid);
    cert.passed = cert.deviation_gap <= thresholds.max_deviation_gap &&
                  cert.off_support_mass <= thresholds.max_off_support_mass &&
                  cert.self_consistency <= thresholds.max_self_consistency;
    return cert;
}

AnnealReport solve_annealed(const ModelSpec& model, Mode mode, const AnnealSchedule& schedule,
                            const SolverConfig& solver, const CertificateThresholds& thresholds) {
    if (!(schedule.lambda0 > 0.0 && schedule.lambda0 <= 1.0))
        throw Precondition("lambda0 must lie in (0,1]");
    if (!(schedule.factor > 0.0 && schedule.factor < 1.0))
        throw Precondition("schedule factor must lie in (0,1)");
    if (!(schedule.lambda_min > 0.0 && schedule.lambda_min <= schedule.lambda0))
        throw Precondition("lambda_min must lie in (0, lambda0]");

    std::vector<double> lambdas;
    for (double l = schedule.lambda0; l > schedule.lambda_min; l *= schedule.factor)
        lambdas.push_back(l);
    lambdas.push_back(schedule.lambda_min);

    AnnealReport out;
    ValueVector y(model.states, 0.0);
    bool any_converged = false;
    for (double lambda : lambdas) {
        AnnealStage stage;
        stage.lambda = lambda;
        SolverConfig cfg = solver;
        stage.report = solve_fixed_point(y, lambda, model, mode, cfg);
        // The map stiffens as lambda shrinks; retry with smaller damping
        // rather than dropping the stage.
        while (!stage.report.converged && cfg.theta > 1e-4) {
            cfg.theta *= 0.25;
            ++stage.damping_retries;
            stage.report = solve_fixed_point(y, lambda, model, mode, cfg);
        }
        if (stage.report.converged) {
            any_converged = true;
            y = stage.report.y;
        } else {
            out.all_converged = false;
        }
        stage.policy = gibbs_policy(y, lambda, model, mode);
        const double support_tol = default_support_gap_tol(y, model, lambda);
        for (int i = 0; i < model.states; ++i) {
            const ObjectiveRow row = one_step_objective(model, mode, y, i);
            Compensated value;
            double off_mass = 0.0;
            for (std::size_t k = 0; k < row.size(); ++k) {
                const double mass = model.grid.weights[k] * stage.policy.rho[i][k];
                value.add_product(mass, row.value(k));
                if (row.gap_from_max(k) < -support_tol) off_mass += mass;
            }
            stage.deviation_gap = std::max(stage.deviation_gap, row.max_value() - value.value());
            stage.off_support_mass = std::max(stage.off_support_mass, off_mass);
        }
        out.stages.push_back(std::move(stage));
    }
    if (!any_converged) throw AllStagesDiverged("no annealing stage reached its residual target");

    const double lambda_last = lambdas.back();
    out.final_policy = gibbs_policy(y, lambda_last, model, mode);
    if (mode == Mode::dt) {
        out.aux_value = value_dt(out.final_policy, 0.0, 1, model, 1e-10);
        out.final_value = value_dt(out.final_policy, 0.0, 0, model, 1e-10);
    } else {
        out.aux_value = value_ct(out.final_policy, 0.0, 0.0, model, 1e-10);
        out.final_value = out.aux_value; // from-time-zero and auxiliary values coincide
    }
    out.certificate = certify(out.final_policy, out.aux_value, model, mode, thresholds, lambda_last);
    return out;
}

} // namespace tieq
