#include "tieq/bridge.hpp"

#include <cmath>
#include <string>

#include "tieq/entropy_gibbs.hpp"
#include "tieq/errors.hpp"

namespace tieq {

ModelSpec discretize(const ModelSpec& ct_model, double h) {
    if (ct_model.mode() != Mode::ct) throw ModeMismatch("discretize needs a continuous-time model");
    if (!(h > 0.0)) throw Precondition("step must be positive");
    const Tensor3& q = *ct_model.generator;
    double max_exit = 0.0;
    for (int k = 0; k < q.n_nodes; ++k)
        for (int i = 0; i < q.n_from; ++i) max_exit = std::max(max_exit, std::abs(q(k, i, i)));
    if (h * max_exit > 1.0 + 1e-12)
        throw StepTooLarge("step " + std::to_string(h) + " breaks row stochasticity (h max|q_ii| = " +
                           std::to_string(h * max_exit) + ")");

    ModelSpec dt_model;
    dt_model.states = ct_model.states;
    dt_model.grid = ct_model.grid;
    dt_model.reward = ct_model.reward.sampled(h);
    Tensor3 p(q.n_nodes, q.n_from, q.n_to);
    for (int k = 0; k < q.n_nodes; ++k)
        for (int i = 0; i < q.n_from; ++i)
            for (int j = 0; j < q.n_to; ++j)
                p(k, i, j) = h * q(k, i, j) + (i == j ? 1.0 : 0.0);
    dt_model.transition = std::move(p);
    dt_model.cone = ct_model.cone;
    finalize_model(dt_model);
    return dt_model;
}

double policy_distance(const RelaxedPolicy& a, const RelaxedPolicy& b, const ActionGrid& grid) {
    if (a.states() != b.states()) throw Precondition("policies have different state counts");
    double dist = 0.0;
    for (int i = 0; i < a.states(); ++i) {
        double l1 = 0.0;
        for (std::size_t k = 0; k < grid.size(); ++k)
            l1 += grid.weights[k] * std::abs(a.rho[i][k] - b.rho[i][k]);
        dist = std::max(dist, l1);
    }
    return dist;
}

BridgeReport convergence_study(const ModelSpec& ct_model, double lambda,
                               const std::vector<double>& h_list, const SolverConfig& solver) {
    if (!(lambda > 0.0)) throw NonpositiveLambda("convergence_study requires lambda > 0");
    if (h_list.empty()) throw Precondition("h list must not be empty");
    for (std::size_t i = 0; i + 1 < h_list.size(); ++i)
        if (!(h_list[i] > h_list[i + 1]))
            throw Precondition("h list must be strictly decreasing");

    BridgeReport out;
    out.ct_report = solve_fixed_point(ValueVector(ct_model.states, 0.0), lambda, ct_model,
                                      Mode::ct, solver);
    out.ct_policy = gibbs_policy(out.ct_report.y, lambda, ct_model, Mode::ct);

    for (double h : h_list) {
        const ModelSpec dt_model = discretize(ct_model, h);
        const double h_lambda = h * lambda;
        const FixedPointReport rep =
            solve_fixed_point(out.ct_report.y, h_lambda, dt_model, Mode::dt, solver);
        BridgeRow row;
        row.h = h;
        row.converged = rep.converged;
        row.value_gap = inf_dist(rep.y, out.ct_report.y);
        const RelaxedPolicy pi_h = gibbs_policy(rep.y, h_lambda, dt_model, Mode::dt);
        row.policy_gap = policy_distance(pi_h, out.ct_policy, ct_model.grid);
        out.rows.push_back(row);
    }
    return out;
}

} // namespace tieq
