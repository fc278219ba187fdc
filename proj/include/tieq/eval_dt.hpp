#pragma once

#include "tieq/model.hpp"
#include "tieq/numeric.hpp"

namespace tieq {

// Kernel induced by a relaxed policy: P[i][j] = sum_k w_k rho[i][k] p[k][i][j].
Matrix policy_kernel(const RelaxedPolicy& pi, const ModelSpec& model);

// Truncated series sum_{k=0}^T P^k r_k with
//   r_k(i) = sum_m w_m rho[i][m] f(offset+k, i, u_m) + lambda delta(offset+k) H(pi(i)).
// offset 0 gives the value from time zero, offset 1 the one-step-ahead
// auxiliary value. The horizon T guarantees |truncation error| <= tol per entry.
ValueVector value_dt(const RelaxedPolicy& pi, double lambda, int offset,
                     const ModelSpec& model, double tol);

// Throws NotNormalized / NegativeDensity if the policy is not a grid density.
void check_policy(const RelaxedPolicy& pi, const ModelSpec& model);

} // namespace tieq
