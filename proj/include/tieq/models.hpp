#pragma once

#include <cstdint>

#include "tieq/model.hpp"

namespace tieq::models {

// Two-state continuous-time model on U = [0,1] where the action sets the
// switching rate in both directions and both running rewards are strictly
// convex in the action. Grid includes the box endpoints so corner actions are
// exact nodes. No deterministic policy is stable for it.
ModelSpec two_state_switching(int per_dim_count = 33);

// Single state, zero reward, U = [0,2], delta(t) = 0.5^t: the regularized
// value is driven by the entropy term alone.
ModelSpec entropy_only_single_state(int per_dim_count = 8);

// Two states, scalar action u in [lo, hi] picking the probability of moving
// to state 2; per-state reward c_i - a_i (u - m_i)^2 (concave for a_i > 0,
// linear for a_i = 0).
struct DirectChoiceParams {
    double lo = 0.0, hi = 1.0;
    double a1 = 1.0, m1 = 0.3, c1 = 1.0;
    double a2 = 2.0, m2 = 0.7, c2 = 0.5;
};
ModelSpec direct_choice_two_state(int per_dim_count, const DirectChoiceParams& params = {},
                                  double discount_factor = 0.7);

// Random discrete-time model with exponential discounting. Rows are drawn
// from a Dirichlet-like normalization, rewards uniform in [0,1]. Seeds whose
// optimal policy has a one-step argmax separation below min_gap are re-rolled
// deterministically so downstream comparisons are well-posed.
ModelSpec random_dt_model(int states, int per_dim_count, double discount_factor,
                          std::uint64_t seed, double min_gap = 0.05);

// Reward and kernel independent of the action: every policy is equivalent.
ModelSpec constant_model(int states, int per_dim_count, Mode mode);

// Zero generator, constant per-state reward, mixture-of-exponentials discount.
ModelSpec frozen_chain(int states, int per_dim_count, double reward_level);

} // namespace tieq::models
