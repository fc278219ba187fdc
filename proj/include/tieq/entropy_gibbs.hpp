#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tieq/model.hpp"
#include "tieq/numeric.hpp"

namespace tieq {

// Differential entropy of a grid density: -sum_k w_k rho_k ln(rho_k), with the
// 0 ln 0 = 0 convention so one-hot densities are admissible.
double entropy(std::span<const double> rho, const ActionGrid& grid);

// One-step objective a_k = f(0, i, u_k) + kernel_row(u_k, i) . y, carried as
// compensated hi/lo pairs so that differences a_k - a_j cancel constant
// offsets exactly (needed for shift invariance and the step-size scaling
// identity of the time discretization).
struct ObjectiveRow {
    std::vector<double> hi;
    std::vector<double> lo;
    std::size_t argmax = 0;

    std::size_t size() const { return hi.size(); }
    double value(std::size_t k) const { return hi[k] + lo[k]; }
    // a_k - a_argmax, exact to well below one ulp of the operands.
    double gap_from_max(std::size_t k) const {
        const TwoSum t = two_sum(hi[k], -hi[argmax]);
        return t.hi + (t.lo + (lo[k] - lo[argmax]));
    }
    double max_value() const { return value(argmax); }
};

ObjectiveRow one_step_objective(const ModelSpec& model, Mode mode,
                                std::span<const double> y, int state);

// Gibbs density over grid nodes, proportional to exp(a_k / lambda) and
// renormalized against the quadrature weights. Strictly positive up to
// floating-point underflow far from the maximum.
std::vector<double> gibbs_from_objective(const ObjectiveRow& row, double lambda,
                                         const ActionGrid& grid);

std::vector<double> gibbs(std::span<const double> y, int state, double lambda,
                          const ModelSpec& model, Mode mode);

RelaxedPolicy gibbs_policy(std::span<const double> y, double lambda,
                           const ModelSpec& model, Mode mode);

// lambda * ln( sum_k w_k exp(a_k / lambda) ), the value of the entropy-smoothed
// one-step maximization; equals the Gibbs policy's own one-step objective.
double softmax_value(const ObjectiveRow& row, double lambda, const ActionGrid& grid);

// Constants for the entropy growth bounds. All are conservative numeric
// surrogates built from the cone geometry and the Lipschitz envelope; they are
// reported by diagnostics, never used to abort.
struct BoundConstants {
    double k0 = 0.0;     // exp(-1) * volume of the cone cap
    double k1 = 0.0;     // angular factor
    double k2 = 0.0;     // radial factor, int_0^1 z^(dims-1) e^-z dz
    double theta = 0.0;  // Lipschitz envelope used (already dimension-inflated)
    double ln_leb = 0.0; // |ln Leb(U)|
    int dims = 1;
    double kappa1 = 0.0; // lambda-uniform constant
    double kappa2 = 0.0; // coefficient of |ln lambda|

    double c_bound(double lambda) const;              // density <= C (1+|y|)^dims
    double kappa(double lambda) const;                // |H| <= kappa + dims ln(1+|y|)
    double phi(double lambda, double ynorm) const;    // the bound itself
    double lambda_uniform(double lambda, double ynorm) const;
    double eta(double ynorm) const;                   // K (1 + ln(1+|y|)), K uniform in lambda
    double uniform_k() const;
};

BoundConstants bound_constants(const ModelSpec& model);

// Largest alpha with alpha <= (1 + lambda * phi(alpha)) * M; iterates stay in
// this ball. lambda < 0 selects the lambda-uniform variant with eta.
double confinement_radius(const ModelSpec& model, double lambda);

struct GibbsDiagnostics {
    double max_density = 0.0;
    std::vector<double> entropy_by_state;
    double upper_bound_ln_leb = 0.0;  // ln Leb(U)
    double lower_bound_phi = 0.0;     // phi(|y|): |H| bound from the cone estimate
    double lambda_uniform_bound = 0.0;
    double density_bound = 0.0;       // C (1+|y|)^dims
    std::vector<std::string> violations;
};

GibbsDiagnostics gibbs_diagnostics(std::span<const double> y, double lambda,
                                   const ModelSpec& model, Mode mode);

} // namespace tieq
