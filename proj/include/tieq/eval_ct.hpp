#pragma once

#include "tieq/model.hpp"
#include "tieq/numeric.hpp"

namespace tieq {

// Generator induced by a relaxed policy: Q[i][j] = sum_k w_k rho[i][k] q[k][i][j].
// Off-diagonal rounding noise is clamped at zero and the diagonal recomputed,
// so the result is a valid rate matrix.
Matrix policy_generator(const RelaxedPolicy& pi, const ModelSpec& model);

// exp(s Q) by uniformization: gamma = max_i |Q_ii|, Ptilde = I + Q/gamma,
// exp(sQ) = sum_n Poisson(n; gamma s) Ptilde^n with tail below tol.
Matrix transition_matrix(const Matrix& q, double s, double tol);

// V(t0, i) = int_0^T [exp(sQ) r(t0+s)]_i ds with
//   r(t, j) = sum_k w_k rho[j][k] f(t, j, u_k) + lambda delta(t) H(pi(j)).
// Horizon tail and Simpson refinement each stay below tol/2.
ValueVector value_ct(const RelaxedPolicy& pi, double lambda, double t0,
                     const ModelSpec& model, double tol);

} // namespace tieq
