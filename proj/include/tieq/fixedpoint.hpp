#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "tieq/model.hpp"

namespace tieq {

struct SolverConfig {
    double theta = 0.5;        // damping in (0, 1]
    double tol = 1e-10;        // residual target, inf-norm
    int max_iter = 1000;
    bool anderson = false;     // secant acceleration over a short window
    int anderson_window = 3;
    bool diagnostics = false;  // track the confinement-ball inequality
    double value_tol_factor = 0.05; // inner evaluation tolerance = tol * factor
};

struct FixedPointReport {
    ValueVector y;
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<std::pair<int, double>> trace; // (iteration, residual)
    bool confinement_ok = true;                // meaningful with diagnostics on
};

// One application of the map: Gibbs policy of y, then its regularized value
// (one-step-ahead in discrete time, from time zero in continuous time).
ValueVector psi(const ValueVector& y, double lambda, const ModelSpec& model, Mode mode,
                double tol);

// Damped iteration y <- (1-theta) y + theta psi(y). Non-convergence is an
// outcome, not an error; the report carries the full residual trace.
FixedPointReport solve_fixed_point(const ValueVector& y0, double lambda,
                                   const ModelSpec& model, Mode mode,
                                   const SolverConfig& cfg);

// Start points for multi-start solves: 0, +-M*1, then random points in the
// invariance ball. Deterministic in the seed.
std::vector<ValueVector> default_starts(const ModelSpec& model, double lambda,
                                        int random_count, std::uint64_t seed);

// Tries the starts in order; returns the first converged report, otherwise
// the one with the smallest residual.
FixedPointReport solve_multistart(const std::vector<ValueVector>& starts, double lambda,
                                  const ModelSpec& model, Mode mode, const SolverConfig& cfg);

} // namespace tieq
