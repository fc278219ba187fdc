#pragma once

#include <vector>

#include "tieq/fixedpoint.hpp"
#include "tieq/model.hpp"

namespace tieq {

// Step-h discrete-time approximation of a continuous-time model:
//   p_h[k][i][j] = h q[k][i][j] + 1{i=j},  f_h(k,i,u) = h f(kh,i,u),
// with the discount sampled at kh. Requires h max_i |q_ii| <= 1.
ModelSpec discretize(const ModelSpec& ct_model, double h);

// max over states of the weighted L1 distance between density rows.
double policy_distance(const RelaxedPolicy& a, const RelaxedPolicy& b, const ActionGrid& grid);

struct BridgeRow {
    double h = 0.0;
    double value_gap = 0.0;  // |y_h - y_ct|_inf
    double policy_gap = 0.0; // weighted L1, max over states
    bool converged = false;
};

struct BridgeReport {
    FixedPointReport ct_report;
    RelaxedPolicy ct_policy;
    std::vector<BridgeRow> rows;
};

// Solves the continuous-time fixed point at lambda once, then each h-model's
// discrete fixed point at entropy weight h*lambda, warm-started from the
// continuous solution.
BridgeReport convergence_study(const ModelSpec& ct_model, double lambda,
                               const std::vector<double>& h_list, const SolverConfig& solver);

} // namespace tieq
