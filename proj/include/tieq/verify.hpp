#pragma once

#include <cstddef>
#include <vector>

#include "tieq/anneal.hpp"
#include "tieq/model.hpp"

namespace tieq {

struct DeviationResult {
    std::vector<double> per_state; // best one-step deviation gain per state
    double max_gap = 0.0;
    std::vector<std::size_t> best_node; // argmax node of the one-step objective
    std::vector<double> sup_value;      // per-state sup (softmax value when lambda > 0)
};

// gap(i) = sup over one-step deviations of the objective at y, minus the
// objective of pi(i) itself. Nonnegative up to rounding. For lambda > 0 the
// sup over densities is the closed-form softmax value; at lambda = 0 it is
// the max over grid nodes.
DeviationResult deviation_test(const RelaxedPolicy& pi, const ValueVector& y, double lambda,
                               const ModelSpec& model, Mode mode);

using StandardPolicy = std::vector<std::size_t>; // node index per state

// Enumerates every standard grid policy and keeps those whose action lies in
// the tol-argmax of the one-step objective at the policy's own value.
std::vector<StandardPolicy> standard_equilibrium_scan(const ModelSpec& model, Mode mode,
                                                      double tol,
                                                      std::size_t cap = 1000000,
                                                      double value_tol = 1e-10);

// Mean action per state, one point in the action box per state.
std::vector<std::vector<double>> mean_action_policy(const RelaxedPolicy& pi,
                                                    const ActionGrid& grid);

struct MeanActionCheck {
    ValueVector j_pi;
    ValueVector j_mean;
    bool match = false;
};

// On direct-choice models (kernel rows equal the action coordinates, last
// state takes the remainder) the value depends on the policy only through its
// mean; checks value(pi) against value(Dirac at the mean action), the mean
// represented by a per-dimension two-node blend with the same mean.
MeanActionCheck mean_action_value_check(const RelaxedPolicy& pi, const ModelSpec& model,
                                        double tol = 1e-4);

// Optimal value under exponential discounting: value iteration (discrete) or
// damped evaluation of the uniformized max-operator (continuous).
ValueVector optimal_value_exponential(const ModelSpec& model, double tol = 1e-12);

struct BellmanReport {
    ValueVector optimal;
    double gap = 0.0;
    bool within = false;
};

// Under exponential discounting an equilibrium value must match the optimal
// one; compares the annealed value against the independent Bellman solve.
BellmanReport bellman_consistency(const ModelSpec& model, const AnnealReport& annealed,
                                  double tol);

struct OracleConfig {
    std::size_t max_nodes = 5;
    int max_states = 3;
    int mixture_levels = 11;    // seed grid for two-node mixture weights
    double gap_tol = 1e-9;      // argmax membership tolerance
    double value_tol = 1e-10;   // evaluation tolerance
};

struct OraclePolicy {
    RelaxedPolicy policy;
    bool standard = false;
    StandardPolicy nodes;   // for standard entries
    double deviation_gap = 0.0;
};

// Exhaustive equilibrium search over standard grid policies and two-node
// mixtures (discrete time). Mixture weights are seeded on a coarse grid and
// refined by bisection on the support-indifference condition; a candidate is
// kept when its whole support sits in the gap_tol-argmax of its own value.
std::vector<OraclePolicy> brute_force_oracle(const ModelSpec& model,
                                             const OracleConfig& cfg = {});

} // namespace tieq
